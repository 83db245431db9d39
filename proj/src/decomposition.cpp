#include "expofront/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace expofront {

double BistochasticMatrix::stochasticError() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < n_; ++j) {
      row += at(i, j);
      col += at(j, i);
      if (at(i, j) < 0.0) worst = std::max(worst, -at(i, j));
    }
    worst = std::max({worst, std::abs(row - 1.0), std::abs(col - 1.0)});
  }
  return worst;
}

void BistochasticMatrix::validate(double tol) const {
  if (n_ == 0) throw NotBistochastic("empty matrix");
  const double err = stochasticError();
  if (err > tol)
    throw NotBistochastic("row/column sums off by " + std::to_string(err));
}

BistochasticMatrix BistochasticMatrix::identity(int n) {
  BistochasticMatrix B(n);
  for (int i = 0; i < n; ++i) B.at(i, i) = 1.0;
  return B;
}

BistochasticMatrix BistochasticMatrix::fromPermutation(const Permutation& p) {
  BistochasticMatrix B(p.size());
  for (int rank = 0; rank < p.size(); ++rank) B.at(p.itemAt(rank), rank) = 1.0;
  return B;
}

std::vector<double> BistochasticMatrix::applyExposure(
    const std::vector<double>& gamma) const {
  if (static_cast<int>(gamma.size()) != n_)
    throw DimensionError("matrix/gamma size mismatch");
  std::vector<double> x(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) x[i] += at(i, j) * gamma[j];
  return x;
}

RankingDistribution caratheodoryDecompose(const std::vector<double>& x,
                                          const Expohedron& polytope,
                                          double tol) {
  if (tol < 0.0) tol = polytope.defaultTol();
  const int n = polytope.dim();
  if (!polytope.check(x, tol).inside())
    throw NotInPolytope("caratheodoryDecompose: point violates majorization");

  RankingDistribution dist;
  std::vector<double> current = x;
  double remaining = 1.0;
  const std::vector<double>& gamma = polytope.gamma();

  for (int step = 0; step <= n; ++step) {
    // Vertex ordering gamma like the current point (ties by item index).
    const std::vector<int> order = polytope.sortedOrder(current);
    const Permutation vertexPerm(order);
    const std::vector<double> vertex = vertexPerm.exposure(gamma);

    double dist2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double diff = current[i] - vertex[i];
      dist2 += diff * diff;
    }
    if (std::sqrt(dist2) <= tol) {
      dist.atoms.push_back({remaining, vertexPerm});
      break;
    }

    // Walk away from the vertex to the boundary; the direction preserves
    // every tight prefix sum because the vertex shares them.
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = current[i] - vertex[i];
    const RayHit hit = polytope.rayBoundaryIntersection(current, d, tol);
    if (!(hit.t > 1e-14)) {
      // Numerically stuck: absorb the residual into the nearest vertex.
      dist.atoms.push_back({remaining, vertexPerm});
      break;
    }
    const double lambda = hit.t / (1.0 + hit.t);
    dist.atoms.push_back({remaining * lambda, vertexPerm});
    remaining *= 1.0 - lambda;
    current = hit.point;
  }

  // Drop negligible atoms and renormalize.
  double total = 0.0;
  std::vector<RankingAtom> kept;
  for (auto& a : dist.atoms)
    if (a.weight > 1e-12) {
      total += a.weight;
      kept.push_back(std::move(a));
    }
  if (kept.empty()) throw EmptyDistribution("decomposition produced no atoms");
  for (auto& a : kept) a.weight /= total;
  dist.atoms = std::move(kept);
  return dist;
}

namespace {

// Kuhn's augmenting-path bipartite matching over the positive support of a
// square matrix, with warm starts between BvN rounds.
class SupportMatcher {
 public:
  explicit SupportMatcher(int n)
      : n_(n), rowMatch_(n, -1), colMatch_(n, -1), visited_(n, 0), stamp_(0) {}

  // adjacency: adj(i) lists columns j with positive support for row i.
  template <typename Adj>
  bool complete(const Adj& adj) {
    for (int i = 0; i < n_; ++i) {
      if (rowMatch_[i] != -1) continue;
      ++stamp_;
      if (!augment(i, adj)) return false;
    }
    return true;
  }

  // Invalidate pairs whose entry lost support.
  template <typename Alive>
  void invalidate(const Alive& alive) {
    for (int i = 0; i < n_; ++i) {
      if (rowMatch_[i] != -1 && !alive(i, rowMatch_[i])) {
        colMatch_[rowMatch_[i]] = -1;
        rowMatch_[i] = -1;
      }
    }
  }

  int columnOf(int row) const { return rowMatch_[row]; }

 private:
  template <typename Adj>
  bool augment(int i, const Adj& adj) {
    for (int j : adj(i)) {
      if (visited_[j] == stamp_) continue;
      visited_[j] = stamp_;
      if (colMatch_[j] == -1 || augment(colMatch_[j], adj)) {
        rowMatch_[i] = j;
        colMatch_[j] = i;
        return true;
      }
    }
    return false;
  }

  int n_;
  std::vector<int> rowMatch_, colMatch_;
  std::vector<int> visited_;
  int stamp_;
};

constexpr double kSupportTol = 1e-12;

}  // namespace

RankingDistribution bvnDecompose(const BistochasticMatrix& B, double tol) {
  B.validate(tol);
  const int n = B.dim();

  std::vector<double> residual = B.data();
  auto entry = [&](int i, int j) -> double& { return residual[i * n + j]; };

  std::vector<std::vector<int>> adjacency(n);
  auto rebuildRow = [&](int i) {
    adjacency[i].clear();
    for (int j = 0; j < n; ++j)
      if (entry(i, j) > kSupportTol) adjacency[i].push_back(j);
  };
  for (int i = 0; i < n; ++i) rebuildRow(i);

  SupportMatcher matcher(n);
  RankingDistribution dist;
  double remaining = 1.0;
  const int maxAtoms = (n - 1) * (n - 1) + 1;

  for (int round = 0; round < maxAtoms; ++round) {
    if (!matcher.complete([&](int i) -> const std::vector<int>& {
          return adjacency[i];
        }))
      throw MatchingNotFound(
          "no perfect matching on the positive support (round " +
          std::to_string(round) + ")");

    // items -> ranks: residual(i, j) = mass of item i at rank j.
    std::vector<int> itemsByRank(n);
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const int j = matcher.columnOf(i);
      itemsByRank[j] = i;
      w = std::min(w, entry(i, j));
    }
    dist.atoms.push_back({remaining * w, Permutation(itemsByRank)});

    if (w >= 1.0 - kSupportTol || remaining * (1.0 - w) <= kSupportTol) break;

    // Peel and renormalize so the residual stays bistochastic. Zeroed
    // entries never regain support.
    for (int i = 0; i < n; ++i) {
      const int j = matcher.columnOf(i);
      entry(i, j) = (entry(i, j) - w) / (1.0 - w);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j)
        if (j != matcher.columnOf(i)) entry(i, j) /= (1.0 - w);
      rebuildRow(i);
    }
    matcher.invalidate([&](int i, int j) { return entry(i, j) > kSupportTol; });
    remaining *= 1.0 - w;
  }

  double total = 0.0;
  std::vector<RankingAtom> kept;
  for (auto& a : dist.atoms)
    if (a.weight > 1e-12) {
      total += a.weight;
      kept.push_back(std::move(a));
    }
  if (kept.empty()) throw EmptyDistribution("decomposition produced no atoms");
  for (auto& a : kept) a.weight /= total;
  RankingDistribution out;
  out.atoms = std::move(kept);
  return out;
}

std::vector<double> expectedExposure(const RankingDistribution& dist,
                                     const std::vector<double>& gamma) {
  if (dist.atoms.empty()) throw EmptyDistribution("distribution has no atoms");
  std::vector<double> x(gamma.size(), 0.0);
  for (const auto& atom : dist.atoms) {
    const std::vector<double> e = atom.perm.exposure(gamma);
    for (size_t i = 0; i < x.size(); ++i) x[i] += atom.weight * e[i];
  }
  return x;
}

std::vector<Permutation> sampleDeliveries(const RankingDistribution& dist,
                                          int deliveries,
                                          DeliveryStrategy strategy,
                                          std::uint64_t seed) {
  if (dist.atoms.empty()) throw EmptyDistribution("distribution has no atoms");
  if (deliveries < 0) throw InvalidArgument("negative delivery count");

  const int m = static_cast<int>(dist.atoms.size());
  std::vector<Permutation> out;
  out.reserve(deliveries);

  if (strategy == DeliveryStrategy::LowDiscrepancy) {
    std::vector<double> served(m, 0.0);
    for (int t = 1; t <= deliveries; ++t) {
      int best = 0;
      double bestDeficit = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < m; ++a) {
        const double deficit = dist.atoms[a].weight * t - served[a];
        if (deficit > bestDeficit + 1e-15) {
          bestDeficit = deficit;
          best = a;
        }
      }
      served[best] += 1.0;
      out.push_back(dist.atoms[best].perm);
    }
    return out;
  }

  std::mt19937_64 rng(seed);
  std::vector<double> cumulative(m);
  double acc = 0.0;
  for (int a = 0; a < m; ++a) {
    acc += dist.atoms[a].weight;
    cumulative[a] = acc;
  }
  cumulative[m - 1] = 1.0;
  for (int t = 0; t < deliveries; ++t) {
    const double u = uniformReal(rng);
    const int a = static_cast<int>(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    out.push_back(dist.atoms[std::min(a, m - 1)].perm);
  }
  return out;
}

}  // namespace expofront
