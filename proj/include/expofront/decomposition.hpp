#pragma once

#include <cstdint>
#include <vector>

#include "expofront/core.hpp"
#include "expofront/expohedron.hpp"

namespace expofront {

/// Dense n x n matrix with unit row and column sums.
class BistochasticMatrix {
 public:
  BistochasticMatrix() = default;
  BistochasticMatrix(int n, double fill) : n_(n), data_(n * n, fill) {}
  explicit BistochasticMatrix(int n) : BistochasticMatrix(n, 0.0) {}

  int dim() const { return n_; }
  double& at(int i, int j) { return data_[i * n_ + j]; }
  double at(int i, int j) const { return data_[i * n_ + j]; }
  const std::vector<double>& data() const { return data_; }

  /// Largest deviation of any row or column sum from 1.
  double stochasticError() const;
  /// Throws NotBistochastic when stochasticError() > tol.
  void validate(double tol = 1e-9) const;

  static BistochasticMatrix identity(int n);
  static BistochasticMatrix fromPermutation(const Permutation& p);

  /// Expected exposure x = B gamma (row i = item i, column j = rank j).
  std::vector<double> applyExposure(const std::vector<double>& gamma) const;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Expresses a feasible exposure point as a convex combination of at most
/// n rankings by iterative vertex peeling: split off the vertex that orders
/// gamma like x, walk the residual ray to the boundary, repeat. Each step
/// tightens at least one more majorization level.
RankingDistribution caratheodoryDecompose(const std::vector<double>& x,
                                          const Expohedron& polytope,
                                          double tol = -1.0);

/// Birkhoff-von-Neumann: expresses a bistochastic matrix as a convex
/// combination of at most (n-1)^2 + 1 permutation matrices. Each round
/// finds a perfect matching on the positive-support bipartite graph
/// (augmenting paths), peels the minimum matched entry, renormalizes.
RankingDistribution bvnDecompose(const BistochasticMatrix& B, double tol = 1e-9);

/// x = sum_i w_i * perm_i(gamma).
std::vector<double> expectedExposure(const RankingDistribution& dist,
                                     const std::vector<double>& gamma);

enum class DeliveryStrategy { Iid, LowDiscrepancy };

/// T concrete rankings realizing the distribution. LowDiscrepancy schedules
/// atoms by largest deficit so empirical frequencies stay within 1/T of the
/// weights; Iid samples independently (deterministic for a fixed seed).
std::vector<Permutation> sampleDeliveries(const RankingDistribution& dist,
                                          int deliveries,
                                          DeliveryStrategy strategy,
                                          std::uint64_t seed = 0);

}  // namespace expofront
