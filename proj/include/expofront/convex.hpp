#pragma once

#include <memory>
#include <vector>

#include "expofront/core.hpp"
#include "expofront/decomposition.hpp"
#include "expofront/expohedron.hpp"

namespace expofront {

/// One majorization inequality: sum of x over `items` <= bound, where
/// bound is the sum of the |items| largest exposure weights.
struct Cut {
  std::vector<int> items;  // sorted item indices
  double bound = 0.0;
};

/// Finite relaxation of "x is majorized by gamma": generated subset cuts
/// plus the always-present total-sum equality.
struct CutSet {
  std::vector<Cut> cuts;
};

/// Convex subproblem solver over the exposure polytope. Majorization is
/// handled lazily: solve against the current cut set, find the most
/// violated sorted-prefix subsets, cut, repeat. Cuts and active sets are
/// shared across solves on the same instance, so utility sweeps warm-start.
class MajorizationSolver {
 public:
  explicit MajorizationSolver(const QueryInstance& inst);
  ~MajorizationSolver();
  MajorizationSolver(MajorizationSolver&&) noexcept;
  MajorizationSolver& operator=(MajorizationSolver&&) noexcept;

  const QueryInstance& instance() const;
  const Expohedron& polytope() const;

  /// Fairness-optimal exposure with maximal utility among fairness optima:
  /// stage 1 minimizes ||Gx - eps*||, stage 2 maximizes rho.x at the
  /// stage-1 group image. Cached after the first call.
  const std::vector<double>& startPoint();

  /// Least attainable unfairness (computed with startPoint).
  double minUnfairness();

  /// argmin ||Gx - eps*|| subject to rho.x = u and majorization.
  /// Throws UtilityInfeasible outside the attainable utility range.
  std::vector<double> minUnfairnessAtUtility(double u);

  double prpUtility() const;
  double minUtility() const;
  const std::vector<double>& prpVertex() const;

  const CutSet& cuts() const;
  /// Number of fixed-utility solves performed (diagnostics).
  int utilitySolveCount() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrappers constructing a throwaway solver.
std::vector<double> startPoint(const QueryInstance& inst);
std::vector<double> minUnfairnessAtUtility(const QueryInstance& inst, double u);

struct ScalarizedResult {
  BistochasticMatrix matrix;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
};

/// Scalarized baseline on the Birkhoff polytope: projected first-order
/// descent on -alpha * rho^T B gamma + (1-alpha) * ||G B gamma - eps*||^2,
/// projecting by clamping and alternating row/column renormalization.
/// Stops at relative objective change <= 1e-8 or after `solverBudget`
/// iterations (result flagged nonconverged).
ScalarizedResult scalarizedBirkhoffQP(const QueryInstance& inst, double alpha,
                                      int solverBudget = 2000);

}  // namespace expofront
