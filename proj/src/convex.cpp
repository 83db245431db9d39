#include "expofront/convex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "active_set.hpp"

namespace expofront {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct MajorizationSolver::Impl {
  QueryInstance inst;
  Expohedron poly;
  int n, g;
  MatrixXd G;        // g x n group aggregator
  VectorXd rho, target;
  double scale;

  CutSet pool;
  std::set<std::vector<int>> seen;
  MatrixXd Ain;      // one row per cut
  VectorXd bin;

  std::vector<int> warmStage1, warmStage2, warmUtil;
  bool haveStart = false;
  std::vector<double> start;
  double minUnfairnessValue = 0.0;

  std::vector<double> prpVertex, revVertex;
  double prpUtilityValue = 0.0, revUtilityValue = 0.0;
  VectorXd center;
  int utilitySolves = 0;

  explicit Impl(const QueryInstance& instance)
      : inst(instance), poly(instance.exposureWeights) {
    validateInstance(inst);
    n = inst.itemCount();
    g = inst.groupCount();
    scale = poly.scale();

    G = MatrixXd::Zero(g, n);
    for (int i = 0; i < n; ++i) G(inst.groupOf[i], i) = 1.0;
    rho = Eigen::Map<const VectorXd>(inst.relevance.data(), n);
    target = Eigen::Map<const VectorXd>(inst.targetExposure.data(), g);

    center = VectorXd::Constant(n, poly.totalExposure() / n);
    prpVertex = poly.maxUtilityVertex(inst.relevance);
    prpUtilityValue = utilityOf(prpVertex, inst.relevance);
    // Least-utility vertex: smallest weights to the most relevant items.
    {
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return inst.relevance[a] < inst.relevance[b]; });
      revVertex = Permutation(order).exposure(inst.exposureWeights);
      revUtilityValue = utilityOf(revVertex, inst.relevance);
    }

    Ain.resize(0, n);
    bin.resize(0);
    if (n >= 2) {
      // Box seeds keep every relaxation bounded: singletons bound each
      // coordinate above, complements bound it below.
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      for (int i = 0; i < n; ++i) {
        addCut({i});
        std::vector<int> rest;
        rest.reserve(n - 1);
        for (int j : all)
          if (j != i) rest.push_back(j);
        addCut(rest);
      }
    }
  }

  bool addCut(std::vector<int> items) {
    std::sort(items.begin(), items.end());
    if (!seen.insert(items).second) return false;
    Cut cut;
    cut.bound = poly.prefixBound(static_cast<int>(items.size()));
    cut.items = std::move(items);
    const int row = static_cast<int>(Ain.rows());
    Ain.conservativeResize(row + 1, n);
    bin.conservativeResize(row + 1);
    Ain.row(row).setZero();
    for (int i : cut.items) Ain(row, i) = 1.0;
    bin[row] = cut.bound;
    pool.cuts.push_back(std::move(cut));
    return true;
  }

  // Sorted-prefix separation oracle: returns violated top-k subsets.
  std::vector<std::vector<int>> violatedPrefixes(const VectorXd& x,
                                                 double tol) const {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return x[a] > x[b]; });
    std::vector<std::vector<int>> result;
    double prefix = 0.0;
    for (int k = 1; k < n; ++k) {
      prefix += x[order[k - 1]];
      if (prefix - poly.prefixBound(k) > tol)
        result.emplace_back(order.begin(), order.begin() + k);
    }
    return result;
  }

  double cutValue(const std::vector<int>& items, const VectorXd& x) const {
    double s = 0.0;
    for (int i : items) s += x[i];
    return s;
  }

  // Constraint generation around the active-set kernel. `anchor` must be a
  // polytope point satisfying the equalities; it restores feasibility after
  // new cuts arrive.
  VectorXd solve(const MatrixXd& F, const VectorXd& c, const MatrixXd& Aeq,
                 const VectorXd& beq, const VectorXd& anchor,
                 std::vector<int>& warm) {
    const double sepTol = 1e-9 * scale;
    const std::size_t cutBudget = static_cast<std::size_t>(50) * n + 2u * n;
    VectorXd x = anchor;

    for (int round = 0; round < 50 * n + 50; ++round) {
      detail::QpProblem prob{F, c, Aeq, beq, Ain, bin};
      const int maxIter = 200 + 5 * n + static_cast<int>(Ain.rows());
      detail::QpResult r =
          detail::activeSetSolve(prob, x, warm, scale, maxIter);
      if (!r.optimal)
        throw SolverStalled("active-set did not converge within budget");
      x = std::move(r.x);
      warm = std::move(r.active);

      const auto violated = violatedPrefixes(x, sepTol);
      if (violated.empty()) return x;

      double beta = 0.0;
      for (const auto& items : violated) {
        const double bound = poly.prefixBound(static_cast<int>(items.size()));
        if (!addCut(items)) continue;
        const double vx = cutValue(items, x) - bound;
        const double va = cutValue(items, anchor) - bound;
        double b = 1.0;
        if (vx > 0.0 && va < 0.0) b = vx / (vx - va);
        if (vx <= 0.0) b = 0.0;
        beta = std::max(beta, b);
      }
      if (pool.cuts.size() > cutBudget)
        throw SolverStalled("majorization cut budget exhausted");
      beta = std::min(1.0, beta + 1e-12);
      x = (1.0 - beta) * x + beta * anchor;
    }
    throw SolverStalled("constraint generation did not converge");
  }

  MatrixXd onesRow() const {
    MatrixXd r(1, n);
    r.setOnes();
    return r;
  }

  void computeStart() {
    if (haveStart) return;
    if (n == 1) {
      start = inst.exposureWeights;
      minUnfairnessValue = unfairnessOf(start, inst);
      haveStart = true;
      return;
    }
    // Stage 1: closest group image to the target.
    MatrixXd F = std::sqrt(2.0) * G;
    VectorXd c = -2.0 * G.transpose() * target;
    MatrixXd Aeq = onesRow();
    VectorXd beq(1);
    beq[0] = poly.totalExposure();
    VectorXd x1 = solve(F, c, Aeq, beq, center, warmStage1);
    minUnfairnessValue = (G * x1 - target).norm();

    // Stage 2: maximize utility at the stage-1 group image.
    MatrixXd Aeq2(1 + g, n);
    Aeq2.topRows(1) = onesRow();
    Aeq2.bottomRows(g) = G;
    VectorXd beq2(1 + g);
    beq2[0] = poly.totalExposure();
    beq2.tail(g) = G * x1;
    VectorXd x2 = solve(MatrixXd(), -rho, Aeq2, beq2, x1, warmStage2);

    start.assign(x2.data(), x2.data() + n);
    haveStart = true;
  }

  std::vector<double> solveAtUtility(double u) {
    ++utilitySolves;
    if (n == 1) return inst.exposureWeights;
    const double tolU = 1e-7 * scale;
    if (u > prpUtilityValue + tolU)
      throw UtilityInfeasible("requested utility above the maximum " +
                              std::to_string(prpUtilityValue));
    if (u < revUtilityValue - tolU)
      throw UtilityInfeasible("requested utility below the minimum " +
                              std::to_string(revUtilityValue));
    const double uc = std::clamp(u, revUtilityValue, prpUtilityValue);

    // Feasible anchor on the segment between the extreme-utility vertices.
    VectorXd anchor(n);
    const double span = prpUtilityValue - revUtilityValue;
    const double lam = span > 1e-15 ? (uc - revUtilityValue) / span : 1.0;
    for (int i = 0; i < n; ++i)
      anchor[i] = (1.0 - lam) * revVertex[i] + lam * prpVertex[i];

    MatrixXd F = std::sqrt(2.0) * G;
    VectorXd c = -2.0 * G.transpose() * target;
    MatrixXd Aeq(2, n);
    Aeq.topRows(1) = onesRow();
    Aeq.row(1) = rho.transpose();
    VectorXd beq(2);
    beq[0] = poly.totalExposure();
    beq[1] = uc;
    VectorXd x = solve(F, c, Aeq, beq, anchor, warmUtil);
    return std::vector<double>(x.data(), x.data() + n);
  }
};

MajorizationSolver::MajorizationSolver(const QueryInstance& inst)
    : impl_(std::make_unique<Impl>(inst)) {}
MajorizationSolver::~MajorizationSolver() = default;
MajorizationSolver::MajorizationSolver(MajorizationSolver&&) noexcept = default;
MajorizationSolver& MajorizationSolver::operator=(MajorizationSolver&&) noexcept =
    default;

const QueryInstance& MajorizationSolver::instance() const { return impl_->inst; }
const Expohedron& MajorizationSolver::polytope() const { return impl_->poly; }

const std::vector<double>& MajorizationSolver::startPoint() {
  impl_->computeStart();
  return impl_->start;
}

double MajorizationSolver::minUnfairness() {
  impl_->computeStart();
  return impl_->minUnfairnessValue;
}

std::vector<double> MajorizationSolver::minUnfairnessAtUtility(double u) {
  return impl_->solveAtUtility(u);
}

double MajorizationSolver::prpUtility() const { return impl_->prpUtilityValue; }
double MajorizationSolver::minUtility() const { return impl_->revUtilityValue; }
const std::vector<double>& MajorizationSolver::prpVertex() const {
  return impl_->prpVertex;
}
const CutSet& MajorizationSolver::cuts() const { return impl_->pool; }
int MajorizationSolver::utilitySolveCount() const { return impl_->utilitySolves; }

std::vector<double> startPoint(const QueryInstance& inst) {
  MajorizationSolver solver(inst);
  return solver.startPoint();
}

std::vector<double> minUnfairnessAtUtility(const QueryInstance& inst, double u) {
  MajorizationSolver solver(inst);
  return solver.minUnfairnessAtUtility(u);
}

namespace {

// Clamp negatives, then alternate row/column renormalization until both
// sums are within 1e-9 of one.
void projectBistochastic(std::vector<double>& B, int n) {
  for (double& v : B) v = std::max(v, 0.0);
  for (int pass = 0; pass < 1000; ++pass) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += B[i * n + j];
      if (s <= 1e-15) {
        for (int j = 0; j < n; ++j) B[i * n + j] = 1.0 / n;
      } else {
        for (int j = 0; j < n; ++j) B[i * n + j] /= s;
      }
    }
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += B[i * n + j];
      if (s <= 1e-15) {
        for (int i = 0; i < n; ++i) B[i * n + j] = 1.0 / n;
        worst = 1.0;
      } else {
        for (int i = 0; i < n; ++i) B[i * n + j] /= s;
        worst = std::max(worst, std::abs(s - 1.0));
      }
    }
    // Column scaling disturbs rows; measure that drift.
    double rowDrift = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += B[i * n + j];
      rowDrift = std::max(rowDrift, std::abs(s - 1.0));
    }
    if (std::max(worst, rowDrift) <= 1e-9) break;
  }
}

}  // namespace

ScalarizedResult scalarizedBirkhoffQP(const QueryInstance& inst, double alpha,
                                      int solverBudget) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidArgument("alpha must lie in [0,1]");
  validateInstance(inst);
  const int n = inst.itemCount();
  const int g = inst.groupCount();
  const std::vector<double>& gamma = inst.exposureWeights;

  std::vector<double> B(n * n, 1.0 / n);
  double gammaNorm2 = 0.0;
  for (double v : gamma) gammaNorm2 += v * v;

  auto exposureOf = [&](const std::vector<double>& M) {
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x[i] += M[i * n + j] * gamma[j];
    return x;
  };
  auto objective = [&](const std::vector<double>& M) {
    const std::vector<double> x = exposureOf(M);
    double util = 0.0;
    for (int i = 0; i < n; ++i) util += x[i] * inst.relevance[i];
    std::vector<double> r = groupExposure(x, inst.groupOf, g);
    double sq = 0.0;
    for (int j = 0; j < g; ++j) {
      const double d = r[j] - inst.targetExposure[j];
      sq += d * d;
    }
    return -alpha * util + (1.0 - alpha) * sq;
  };

  ScalarizedResult out;
  double h = objective(B);
  double eta = 0.5 / std::max(gammaNorm2, 1e-12);
  const double etaMax = 1e4 / std::max(gammaNorm2, 1e-12);

  int it = 0;
  for (; it < solverBudget; ++it) {
    const std::vector<double> x = exposureOf(B);
    std::vector<double> r = groupExposure(x, inst.groupOf, g);
    for (int j = 0; j < g; ++j) r[j] -= inst.targetExposure[j];
    // Gradient is rank one: (-alpha rho + 2(1-alpha) G^T r) gamma^T.
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i)
      u[i] = -alpha * inst.relevance[i] +
             2.0 * (1.0 - alpha) * r[inst.groupOf[i]];

    bool accepted = false;
    std::vector<double> candidate;
    double hNew = h;
    for (int tries = 0; tries < 40; ++tries) {
      candidate = B;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          candidate[i * n + j] -= eta * u[i] * gamma[j];
      projectBistochastic(candidate, n);
      hNew = objective(candidate);
      if (hNew <= h - 1e-15) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // no descent direction left at this scale
      break;
    }
    B = std::move(candidate);
    const double change = h - hNew;
    h = hNew;
    eta = std::min(eta * 1.5, etaMax);
    if (change <= 1e-8 * std::max(1.0, std::abs(h))) {
      out.converged = true;
      ++it;
      break;
    }
  }

  BistochasticMatrix M(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M.at(i, j) = B[i * n + j];
  out.matrix = std::move(M);
  out.iterations = it;
  out.objective = h;
  return out;
}

}  // namespace expofront
