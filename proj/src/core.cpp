#include "expofront/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace expofront {

namespace {
constexpr double kSumTol = 1e-9;
}

Permutation::Permutation(std::vector<int> itemsByRank)
    : items_(std::move(itemsByRank)) {
  const int n = static_cast<int>(items_.size());
  std::vector<char> seen(n, 0);
  for (int it : items_) {
    if (it < 0 || it >= n || seen[it])
      throw InvalidArgument("permutation is not a bijection on 0.." +
                            std::to_string(n - 1));
    seen[it] = 1;
  }
}

std::vector<int> Permutation::rankOfItem() const {
  std::vector<int> rank(items_.size());
  for (int r = 0; r < size(); ++r) rank[items_[r]] = r;
  return rank;
}

std::vector<double> Permutation::exposure(
    const std::vector<double>& gamma) const {
  if (gamma.size() != items_.size())
    throw DimensionError("permutation/gamma size mismatch");
  std::vector<double> x(items_.size());
  for (int r = 0; r < size(); ++r) x[items_[r]] = gamma[r];
  return x;
}

std::vector<double> dcgExposure(int n) {
  std::vector<double> g(n);
  for (int k = 1; k <= n; ++k) g[k - 1] = 1.0 / std::log2(k + 1.0);
  return g;
}

int countGroups(const std::vector<int>& groupOf) {
  int g = 0;
  for (int j : groupOf) g = std::max(g, j + 1);
  return g;
}

std::vector<double> groupExposure(const std::vector<double>& x,
                                  const std::vector<int>& groupOf,
                                  int groupCount) {
  if (x.size() != groupOf.size())
    throw DimensionError("exposure/group size mismatch");
  std::vector<double> sums(groupCount, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    int j = groupOf[i];
    if (j < 0 || j >= groupCount) throw DimensionError("group id out of range");
    sums[j] += x[i];
  }
  return sums;
}

std::vector<double> buildTargetExposure(const QueryInstance& inst,
                                        const TargetSpec& spec) {
  const int n = inst.itemCount();
  const int g = countGroups(inst.groupOf);
  if (static_cast<int>(inst.groupOf.size()) != n)
    throw DimensionError("relevance/group size mismatch");
  if (static_cast<int>(inst.exposureWeights.size()) != n)
    throw DimensionError("relevance/gamma size mismatch");
  const double totalExposure =
      std::accumulate(inst.exposureWeights.begin(), inst.exposureWeights.end(), 0.0);

  switch (spec.policy) {
    case TargetPolicy::Merit: {
      const double totalRel =
          std::accumulate(inst.relevance.begin(), inst.relevance.end(), 0.0);
      if (totalRel <= 0.0)
        throw ZeroRelevance("merit target undefined: all relevances are zero");
      std::vector<double> target(g, 0.0);
      for (int i = 0; i < n; ++i) target[inst.groupOf[i]] += inst.relevance[i];
      for (double& t : target) t *= totalExposure / totalRel;
      return target;
    }
    case TargetPolicy::SizeProportional: {
      std::vector<double> target(g, 0.0);
      for (int i = 0; i < n; ++i) target[inst.groupOf[i]] += 1.0;
      for (double& t : target) t *= totalExposure / n;
      return target;
    }
    case TargetPolicy::Explicit: {
      if (static_cast<int>(spec.values.size()) != g)
        throw DimensionError("explicit target has wrong group count");
      const double s =
          std::accumulate(spec.values.begin(), spec.values.end(), 0.0);
      if (std::abs(s - totalExposure) > kSumTol)
        throw InvalidArgument("explicit target does not sum to total exposure");
      return spec.values;
    }
  }
  throw InvalidArgument("unknown target policy");
}

QueryInstance withTarget(QueryInstance inst, const TargetSpec& spec) {
  inst.targetExposure = buildTargetExposure(inst, spec);
  return inst;
}

double utilityOf(const std::vector<double>& x,
                 const std::vector<double>& relevance) {
  if (x.size() != relevance.size())
    throw DimensionError("exposure/relevance size mismatch");
  double u = 0.0;
  for (size_t i = 0; i < x.size(); ++i) u += x[i] * relevance[i];
  return u;
}

double unfairnessOf(const std::vector<double>& x, const QueryInstance& inst) {
  if (static_cast<int>(x.size()) != inst.itemCount())
    throw DimensionError("exposure/instance size mismatch");
  const std::vector<double> sums =
      groupExposure(x, inst.groupOf, inst.groupCount());
  double sq = 0.0;
  for (int j = 0; j < inst.groupCount(); ++j) {
    const double d = sums[j] - inst.targetExposure[j];
    sq += d * d;
  }
  return std::sqrt(sq);
}

void validateInstance(const QueryInstance& inst) {
  const int n = inst.itemCount();
  if (n < 1) throw InvalidArgument("instance has no items");
  if (static_cast<int>(inst.groupOf.size()) != n ||
      static_cast<int>(inst.exposureWeights.size()) != n)
    throw DimensionError("instance field sizes disagree");
  for (double r : inst.relevance)
    if (!(r >= 0.0 && r <= 1.0))
      throw InvalidArgument("relevance outside [0,1]");
  for (int k = 0; k + 1 < n; ++k)
    if (!(inst.exposureWeights[k] > inst.exposureWeights[k + 1]))
      throw InvalidArgument("exposure weights not strictly decreasing");
  if (inst.exposureWeights[n - 1] <= 0.0)
    throw InvalidArgument("exposure weights must be positive");

  const int g = inst.groupCount();
  if (g < 1) throw InvalidArgument("instance has no target exposure");
  std::vector<int> members(g, 0);
  for (int j : inst.groupOf) {
    if (j < 0 || j >= g) throw InvalidArgument("group id outside 0..g-1");
    ++members[j];
  }
  for (int j = 0; j < g; ++j)
    if (members[j] == 0)
      throw InvalidArgument("group " + std::to_string(j) + " is empty");

  const double totalExposure = std::accumulate(
      inst.exposureWeights.begin(), inst.exposureWeights.end(), 0.0);
  const double totalTarget = std::accumulate(
      inst.targetExposure.begin(), inst.targetExposure.end(), 0.0);
  if (std::abs(totalExposure - totalTarget) > kSumTol)
    throw InvalidArgument("target exposure does not sum to total exposure");
}

double uniformReal(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniformIndex(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniformIndex over empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

}  // namespace expofront
