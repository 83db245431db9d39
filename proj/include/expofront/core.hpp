#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "expofront/errors.hpp"

namespace expofront {

/// One retrieval query: per-item relevance, a group id per item, the
/// position-based exposure weights, and the per-group target exposure.
///
/// Items are 0-based indices, groups are 0-based internally (the JSON
/// schema carries 1-based group ids).
struct QueryInstance {
  std::string queryId;
  std::vector<double> relevance;       // rho in [0,1]^n
  std::vector<int> groupOf;            // item -> group in [0, g)
  std::vector<double> exposureWeights; // gamma, strictly decreasing, > 0
  std::vector<double> targetExposure;  // eps* in R^g, sums to sum(gamma)

  int itemCount() const { return static_cast<int>(relevance.size()); }
  int groupCount() const { return static_cast<int>(targetExposure.size()); }
};

/// A ranking stored as the item occupying each position (rank 0 = top).
class Permutation {
 public:
  Permutation() = default;
  /// Throws InvalidArgument unless `itemsByRank` is a bijection on 0..n-1.
  explicit Permutation(std::vector<int> itemsByRank);

  int size() const { return static_cast<int>(items_.size()); }
  int itemAt(int rank) const { return items_[rank]; }
  const std::vector<int>& itemsByRank() const { return items_; }
  std::vector<int> rankOfItem() const;

  /// Exposure vector induced by this ranking: exposure[item] = gamma[rank].
  std::vector<double> exposure(const std::vector<double>& gamma) const;

  bool operator==(const Permutation& o) const { return items_ == o.items_; }

 private:
  std::vector<int> items_;
};

struct RankingAtom {
  double weight = 0.0;
  Permutation perm;
};

/// Weighted set of rankings; weights are non-negative and sum to 1.
struct RankingDistribution {
  std::vector<RankingAtom> atoms;
};

enum class TargetPolicy { Merit, SizeProportional, Explicit };

struct TargetSpec {
  TargetPolicy policy = TargetPolicy::Merit;
  std::vector<double> values;  // used by Explicit only
};

/// DCG exposure weights gamma_k = 1/log2(k+1), k = 1..n.
std::vector<double> dcgExposure(int n);

/// Number of groups implied by a group assignment (max id + 1).
int countGroups(const std::vector<int>& groupOf);

/// Sums x per group: result[j] = sum of x_i over items in group j.
std::vector<double> groupExposure(const std::vector<double>& x,
                                  const std::vector<int>& groupOf,
                                  int groupCount);

/// Per-group target exposure under the given policy; always sums to
/// sum(gamma). Merit splits total exposure by relevance share,
/// size-proportional by group size. Explicit values must already sum
/// to sum(gamma) within 1e-9.
std::vector<double> buildTargetExposure(const QueryInstance& inst,
                                        const TargetSpec& spec);

/// Copy of `inst` with targetExposure filled per `spec`.
QueryInstance withTarget(QueryInstance inst, const TargetSpec& spec);

/// Expected utility of an exposure point: sum_i x_i * rho_i.
double utilityOf(const std::vector<double>& x,
                 const std::vector<double>& relevance);

/// Unfairness: Euclidean distance of group exposures from the target.
double unfairnessOf(const std::vector<double>& x, const QueryInstance& inst);

/// Throws on any violated QueryInstance invariant.
void validateInstance(const QueryInstance& inst);

/// RNG helpers used wherever seeded determinism is promised. mt19937_64
/// output is fully standardized, so sequences are identical across
/// platforms; these avoid the implementation-defined std distributions.
double uniformReal(std::mt19937_64& rng);
std::uint64_t uniformIndex(std::mt19937_64& rng, std::uint64_t n);

}  // namespace expofront
