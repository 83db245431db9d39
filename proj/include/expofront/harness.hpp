#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "expofront/core.hpp"
#include "expofront/decomposition.hpp"
#include "expofront/pareto.hpp"

namespace expofront {

// ---------- instance / distribution serialization ----------

/// JSON array of {queryId, relevance, groups (1-based), gamma, target}.
std::string instancesToJson(const std::vector<QueryInstance>& instances);
std::vector<QueryInstance> instancesFromJson(const std::string& text,
                                             bool validate = true);
std::vector<QueryInstance> loadInstances(const std::string& path,
                                         bool validate = true);
void saveInstances(const std::string& path,
                   const std::vector<QueryInstance>& instances);

/// {"atoms": [{"weight": w, "ranking": [item ids by position]}]}
std::string distributionToJson(const RankingDistribution& dist);
RankingDistribution distributionFromJson(const std::string& text);

// ---------- dataset ingestion ----------

struct LetorOptions {
  int groupFeature = 132;        // 1-based feature id carrying the group score
  std::vector<double> binEdges;  // ascending; group = #edges <= value
  double maxRelevanceGrade = 4.0;
};

/// Parses "grade qid:<id> <fid>:<val> ... # comment" lines into raw
/// instances (DCG exposure weights, binned groups, no target yet).
/// Throws ParseError with the line number, MissingFeature when a line
/// lacks the group feature.
std::vector<QueryInstance> parseLetorFile(const std::string& path,
                                          const LetorOptions& opts);

struct DropCounts {
  int maxDocs = 0;
  int singleDocument = 0;
  int allEqualRelevance = 0;
  int singleGroup = 0;
  int allDistinctGroups = 0;
  int retained = 0;

  std::string json() const;
};

struct FilterResult {
  std::vector<QueryInstance> instances;  // group ids compacted to 0..g-1
  DropCounts drops;
};

/// Drops oversized, single-document, constant-relevance, single-group and
/// all-distinct-group queries; first matching rule is counted.
FilterResult filterInstances(std::vector<QueryInstance> instances,
                             int maxDocs = 100);

// ---------- synthetic data ----------

enum class SyntheticKind { Small, Large };  // n in [8,20] / n in [5,100]

/// Seed-deterministic instances with uniform relevance, a uniform group
/// count in [2, n-1], non-empty uniform group assignment, DCG weights and
/// merit targets; all outputs pass filterInstances.
std::vector<QueryInstance> genSynthetic(SyntheticKind kind, int count,
                                        std::uint64_t seed);

/// Same recipe with a fixed item count (benchmark helper).
QueryInstance genSyntheticWithSize(int n, std::uint64_t seed);

// ---------- experiments ----------

struct MethodSpec {
  enum class Kind { Pexpo, SphereExpo, BirkhoffQP, Ctrl, QpSweep };
  Kind kind = Kind::Pexpo;
  int rounds = 3;                  // SphereExpo bisection rounds
  int samplesPerArc = 5;           // SphereExpo
  std::vector<double> alphaGrid;   // BirkhoffQP
  std::vector<double> lambdaGrid;  // Ctrl
  int gridPoints = 20;             // QpSweep
  int qpBudget = 2000;             // BirkhoffQP iteration budget

  static const char* name(Kind k);
};

struct ExperimentConfig {
  MethodSpec method;
  std::vector<QueryInstance> dataset;
  std::uint64_t seed = 0;
  int deliveries = 1000;  // rankings delivered per query
  int threads = 0;        // 0 = hardware concurrency
};

struct PhaseTimes {
  double front = 0.0;
  double decomposition = 0.0;
  double delivery = 0.0;
  double total() const { return front + decomposition + delivery; }
};

struct QueryReport {
  std::string queryId;
  bool failed = false;
  std::string error;
  PhaseTimes seconds;
  int utilityQpSolves = 0;
};

/// One CSV row of the fronts file.
struct FrontRecord {
  std::string queryId;
  std::string method;
  double param = 0.0;  // K / alpha / lambda / grid index
  double utility = 0.0;
  double unfairness = 0.0;
  double normalizedUtility = 0.0;    // U / U_PRP
  double normalizedUnfairness = 0.0; // F / F_PRP (NaN when F_PRP ~ 0)
  std::vector<double> exposure;
};

std::string frontRecordsToCsv(const std::vector<FrontRecord>& rows);
std::vector<FrontRecord> frontRecordsFromCsv(const std::string& text);

struct ExperimentResult {
  std::vector<FrontRecord> rows;
  std::vector<QueryReport> reports;
  int failures = 0;

  std::string frontsCsv() const { return frontRecordsToCsv(rows); }
  std::string runtimeJson() const;
  std::string methodName;
};

/// Runs the configured method per query on a worker pool, recording
/// wall-clock per phase. Per-query failures are recorded and skipped.
/// Throws EmptyDataset on an empty dataset.
ExperimentResult runExperiment(const ExperimentConfig& config);

// ---------- aggregation ----------

struct AggregatedCurve {
  std::vector<double> grid;         // normalized unfairness levels in [0,1]
  std::vector<double> meanUtility;  // mean normalized utility per level
  std::vector<int> queryCount;
  int skippedQueries = 0;  // queries whose PRP point is already fair
};

/// Clamped linear interpolation of each query's normalized front on a
/// uniform unfairness grid, averaged across queries.
AggregatedCurve aggregateFronts(const std::vector<FrontRecord>& rows,
                                int gridSize);

std::string aggregatedCurveToCsv(const AggregatedCurve& curve);

// ---------- runtime benchmark ----------

struct BenchReport {
  int queries = 0;
  int items = 0;
  double caratheodorySeconds = 0.0;  // mean per query
  double bvnSeconds = 0.0;
  double sphereSeconds = 0.0;        // SphereExpo K=3, ~20 points
  double birkhoffQpSeconds = 0.0;    // 20-value alpha grid
  int qpBudget = 0;

  std::string json() const;
  std::string table() const;
};

/// Times Caratheodory vs BvN on the same scalarized-QP solution and
/// SphereExpo vs the alpha-grid baseline, per query.
BenchReport runBench(int queries, int items, std::uint64_t seed);

}  // namespace expofront
