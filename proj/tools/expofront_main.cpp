// Command-line front end: synthetic data, LETOR ingestion, Pareto fronts,
// the controller baseline, decompositions, runtime benchmarks and front
// aggregation. See README.md for examples.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <json.hpp>

#include "expofront/controller.hpp"
#include "expofront/convex.hpp"
#include "expofront/harness.hpp"
#include "expofront/pareto.hpp"

using namespace expofront;

namespace {

void writeOut(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::vector<double> parseGrid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) grid.push_back(std::stod(tok));
  }
  return grid;
}

std::string rowsToJson(const std::vector<FrontRecord>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"queryId", r.queryId},
                   {"method", r.method},
                   {"param", r.param},
                   {"utility", r.utility},
                   {"unfairness", r.unfairness},
                   {"normalizedUtility", r.normalizedUtility},
                   {"normalizedUnfairness", r.normalizedUnfairness},
                   {"exposure", r.exposure}});
  return arr.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto fronts between ranking utility and group-exposure "
               "fairness on the exposure polytope"};
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate synthetic instances");
  std::string synthKind = "ds";
  int synthCount = 50;
  std::uint64_t seed = 0;
  std::string outPath;
  synth->add_option("--kind", synthKind, "ds (n in 8..20) or dl (n in 5..100)");
  synth->add_option("--count", synthCount, "number of queries");
  synth->add_option("--seed", seed, "RNG seed");
  synth->add_option("--out", outPath, "output path (default stdout)");

  // ---- parse ----
  auto* parse = app.add_subcommand("parse", "parse a labeled sparse ranking file");
  std::string parseInput, dropsPath;
  int groupFeature = 132, maxDocs = 100;
  double maxGrade = 4.0;
  std::string binEdgesCsv = "";
  std::string targetPolicy = "merit";
  parse->add_option("--input", parseInput, "input file")->required();
  parse->add_option("--group-feature", groupFeature, "1-based feature id");
  parse->add_option("--bin-edges", binEdgesCsv, "comma-separated bin edges");
  parse->add_option("--max-grade", maxGrade, "relevance grade divisor");
  parse->add_option("--max-docs", maxDocs, "drop queries with more documents");
  parse->add_option("--target-policy", targetPolicy, "merit | size-proportional");
  parse->add_option("--drops", dropsPath, "write drop counts JSON here");
  parse->add_option("--out", outPath, "output path (default stdout)");

  // ---- front ----
  auto* frontCmd = app.add_subcommand("front", "compute Pareto fronts");
  std::string instancesPath, method = "pexpo", format = "csv", runtimePath;
  int kRounds = 3, nSample = 5, gridPoints = 20, deliveries = 1000, threads = 0,
      qpBudget = 2000;
  std::string alphaGridCsv = "", lambdaGridCsv = "";
  frontCmd->add_option("--instances", instancesPath, "instance JSON")->required();
  frontCmd->add_option("--method", method,
                       "pexpo | sphere | qp-sweep | birkhoff-qp");
  frontCmd->add_option("--k", kRounds, "sphere: bisection rounds");
  frontCmd->add_option("--n-sample", nSample, "sphere: samples per arc");
  frontCmd->add_option("--grid-points", gridPoints, "qp-sweep: grid size");
  frontCmd->add_option("--alpha-grid", alphaGridCsv, "birkhoff-qp: alphas");
  frontCmd->add_option("--lambda-grid", lambdaGridCsv, "ctrl: gains");
  frontCmd->add_option("--qp-budget", qpBudget, "birkhoff-qp: iteration budget");
  frontCmd->add_option("--t", deliveries, "rankings delivered per query");
  frontCmd->add_option("--threads", threads, "worker threads (0 = auto)");
  frontCmd->add_option("--seed", seed, "RNG seed");
  frontCmd->add_option("--format", format, "csv | json");
  frontCmd->add_option("--out", outPath, "fronts output (default stdout)");
  frontCmd->add_option("--runtime", runtimePath, "runtime report JSON path");

  // ---- ctrl ----
  auto* ctrlCmd = app.add_subcommand("ctrl", "controller baseline trajectories");
  std::string ctrlInstances, ctrlLambdaCsv = "0,1,10";
  int ctrlT = 1000;
  ctrlCmd->add_option("--instances", ctrlInstances, "instance JSON")->required();
  ctrlCmd->add_option("--lambda-grid", ctrlLambdaCsv, "gains to simulate");
  ctrlCmd->add_option("--t", ctrlT, "horizon");
  ctrlCmd->add_option("--out", outPath, "trajectory CSV (default stdout)");

  // ---- decompose ----
  auto* dec = app.add_subcommand("decompose", "decompose a point into rankings");
  std::string decInstances, decMethod = "caratheodory", decQuery, exposureJson;
  double decUtility = std::numeric_limits<double>::quiet_NaN();
  double decAlpha = 0.5;
  int decDeliver = 0;
  std::string decStrategy = "low-discrepancy";
  dec->add_option("--instances", decInstances, "instance JSON")->required();
  dec->add_option("--query", decQuery, "queryId (default: first instance)");
  dec->add_option("--method", decMethod, "caratheodory | bvn");
  dec->add_option("--exposure", exposureJson,
                  "caratheodory: exposure point as a JSON array");
  dec->add_option("--utility", decUtility,
                  "caratheodory: decompose the min-unfairness point at this "
                  "utility");
  dec->add_option("--alpha", decAlpha, "bvn: scalarized solution to decompose");
  dec->add_option("--deliver", decDeliver, "also sample this many rankings");
  dec->add_option("--strategy", decStrategy, "iid | low-discrepancy");
  dec->add_option("--seed", seed, "RNG seed for iid delivery");
  dec->add_option("--out", outPath, "distribution JSON (default stdout)");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "runtime comparison table");
  int benchQueries = 20, benchItems = 100;
  bench->add_option("--queries", benchQueries, "number of queries");
  bench->add_option("--items", benchItems, "items per query");
  bench->add_option("--seed", seed, "RNG seed");
  bench->add_option("--out", outPath, "report JSON (default stdout)");

  // ---- aggregate ----
  auto* agg = app.add_subcommand("aggregate", "aggregate fronts over queries");
  std::string aggFronts;
  int aggGrid = 50;
  agg->add_option("--fronts", aggFronts, "fronts CSV path")->required();
  agg->add_option("--grid-size", aggGrid, "normalized unfairness levels");
  agg->add_option("--out", outPath, "aggregate CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const SyntheticKind kind =
          synthKind == "dl" ? SyntheticKind::Large : SyntheticKind::Small;
      writeOut(outPath, instancesToJson(genSynthetic(kind, synthCount, seed)));
    } else if (parse->parsed()) {
      LetorOptions opts;
      opts.groupFeature = groupFeature;
      opts.binEdges = parseGrid(binEdgesCsv);
      opts.maxRelevanceGrade = maxGrade;
      FilterResult filtered =
          filterInstances(parseLetorFile(parseInput, opts), maxDocs);
      const TargetSpec spec{targetPolicy == "size-proportional"
                                ? TargetPolicy::SizeProportional
                                : TargetPolicy::Merit,
                            {}};
      for (auto& inst : filtered.instances) inst = withTarget(inst, spec);
      if (!dropsPath.empty())
        writeOut(dropsPath, filtered.drops.json() + "\n");
      else
        std::cerr << filtered.drops.json() << "\n";
      writeOut(outPath, instancesToJson(filtered.instances));
    } else if (frontCmd->parsed()) {
      ExperimentConfig cfg;
      cfg.dataset = loadInstances(instancesPath);
      cfg.seed = seed;
      cfg.deliveries = deliveries;
      cfg.threads = threads;
      auto& m = cfg.method;
      if (method == "pexpo") m.kind = MethodSpec::Kind::Pexpo;
      else if (method == "sphere") m.kind = MethodSpec::Kind::SphereExpo;
      else if (method == "qp-sweep") m.kind = MethodSpec::Kind::QpSweep;
      else if (method == "birkhoff-qp") m.kind = MethodSpec::Kind::BirkhoffQP;
      else if (method == "ctrl") m.kind = MethodSpec::Kind::Ctrl;
      else throw InvalidArgument("unknown method '" + method + "'");
      m.rounds = kRounds;
      m.samplesPerArc = nSample;
      m.gridPoints = gridPoints;
      m.qpBudget = qpBudget;
      m.alphaGrid = parseGrid(alphaGridCsv);
      if (m.alphaGrid.empty())
        for (int i = 0; i < 20; ++i) m.alphaGrid.push_back(i / 19.0);
      m.lambdaGrid = parseGrid(lambdaGridCsv);
      if (m.lambdaGrid.empty()) m.lambdaGrid = {0, 1, 10, 100};

      const ExperimentResult res = runExperiment(cfg);
      writeOut(outPath, format == "json" ? rowsToJson(res.rows) : res.frontsCsv());
      if (!runtimePath.empty()) writeOut(runtimePath, res.runtimeJson());
      for (const auto& r : res.reports)
        if (r.failed)
          std::cerr << "query " << r.queryId << " failed: " << r.error << "\n";
      if (res.failures * 10 > static_cast<int>(cfg.dataset.size())) return 1;
    } else if (ctrlCmd->parsed()) {
      const auto instances = loadInstances(ctrlInstances);
      std::ostringstream os;
      os << "queryId,lambda,step,stepUtility,cumulativeUnfairness\n";
      for (const auto& inst : instances)
        for (double lambda : parseGrid(ctrlLambdaCsv)) {
          const CtrlResult r = ctrlSimulate(inst, lambda, ctrlT);
          for (size_t s = 0; s < r.trajectory.size(); ++s)
            os << inst.queryId << ',' << lambda << ',' << (s + 1) << ','
               << r.trajectory[s].stepUtility << ','
               << r.trajectory[s].cumulativeUnfairness << '\n';
        }
      writeOut(outPath, os.str());
    } else if (dec->parsed()) {
      const auto instances = loadInstances(decInstances);
      if (instances.empty()) throw EmptyDataset("no instances");
      const QueryInstance* inst = &instances.front();
      if (!decQuery.empty()) {
        inst = nullptr;
        for (const auto& q : instances)
          if (q.queryId == decQuery) inst = &q;
        if (!inst) throw InvalidArgument("query '" + decQuery + "' not found");
      }
      RankingDistribution dist;
      if (decMethod == "bvn") {
        const ScalarizedResult r = scalarizedBirkhoffQP(*inst, decAlpha);
        dist = bvnDecompose(r.matrix, 1e-6);
      } else {
        const Expohedron poly(inst->exposureWeights);
        std::vector<double> x;
        if (!exposureJson.empty())
          x = nlohmann::json::parse(exposureJson).get<std::vector<double>>();
        else if (!std::isnan(decUtility))
          x = minUnfairnessAtUtility(*inst, decUtility);
        else
          x = startPoint(*inst);
        dist = caratheodoryDecompose(x, poly);
      }
      std::string text = distributionToJson(dist);
      if (decDeliver > 0) {
        const auto seq = sampleDeliveries(
            dist, decDeliver,
            decStrategy == "iid" ? DeliveryStrategy::Iid
                                 : DeliveryStrategy::LowDiscrepancy,
            seed);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : seq) arr.push_back(p.itemsByRank());
        text.pop_back();
        text = text.substr(0, text.find_last_of('}')) +
               ",\n  \"deliveries\": " + arr.dump() + "\n}\n";
      }
      writeOut(outPath, text);
    } else if (bench->parsed()) {
      const BenchReport report = runBench(benchQueries, benchItems, seed);
      std::cerr << report.table();
      writeOut(outPath, report.json());
    } else if (agg->parsed()) {
      std::ifstream in(aggFronts, std::ios::binary);
      if (!in) throw Error("cannot open " + aggFronts);
      std::ostringstream ss;
      ss << in.rdbuf();
      const AggregatedCurve curve =
          aggregateFronts(frontRecordsFromCsv(ss.str()), aggGrid);
      writeOut(outPath, aggregatedCurveToCsv(curve));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
