#include "active_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "expofront/errors.hpp"

namespace expofront::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Orthonormal basis of the kernel of A (rows = constraint normals).
Eigen::MatrixXd kernelBasis(const Eigen::MatrixXd& A, int n) {
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.transpose());
  const int rank = static_cast<int>(qr.rank());
  const int nz = n - rank;
  if (nz <= 0) return Eigen::MatrixXd(n, 0);
  Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(n, nz);
  for (int j = 0; j < nz; ++j) sel(rank + j, j) = 1.0;
  return qr.householderQ() * sel;
}

// Removes the direction of `a` from the orthonormal basis Z in place.
// Returns false (Z untouched) when a is already orthogonal to span(Z).
bool shrinkKernel(Eigen::MatrixXd& Z, const Eigen::VectorXd& a) {
  const Eigen::VectorXd w = Z.transpose() * a;
  const double wn = w.norm();
  if (wn <= 1e-10 * std::max(1.0, a.norm())) return false;
  // Householder rotation sending w to ||w|| e0, applied to Z's columns.
  Eigen::VectorXd h = w;
  h[0] += (w[0] >= 0.0 ? wn : -wn);
  const double hn2 = h.squaredNorm();
  if (hn2 > 0.0) {
    const Eigen::VectorXd Zh = Z * h;
    Z.noalias() -= (2.0 / hn2) * Zh * h.transpose();
  }
  // First column now spans the removed direction.
  const int nz = static_cast<int>(Z.cols());
  Z = Z.rightCols(nz - 1).eval();
  return true;
}

}  // namespace

QpResult activeSetSolve(const QpProblem& prob, Eigen::VectorXd x0,
                        const std::vector<int>& warmActive, double scale,
                        int maxIterations) {
  const int n = static_cast<int>(x0.size());
  const int m = static_cast<int>(prob.Ain.rows());
  const int k = static_cast<int>(prob.Aeq.rows());
  const double actTol = 1e-9 * scale;
  const double stepTol = 1e-12 * scale;
  const double multTol = 1e-9 * (1.0 + prob.c.cwiseAbs().maxCoeff());

  QpResult res;
  res.x = std::move(x0);

  std::vector<char> inW(m, 0);
  std::vector<int> W;
  {
    const Eigen::VectorXd slack = prob.bin - prob.Ain * res.x;
    for (int j : warmActive)
      if (j >= 0 && j < m && !inW[j] && std::abs(slack[j]) <= 10.0 * actTol) {
        inW[j] = 1;
        W.push_back(j);
      }
    std::sort(W.begin(), W.end());
  }

  auto activeMatrix = [&]() {
    Eigen::MatrixXd Aact(k + static_cast<int>(W.size()), n);
    if (k > 0) Aact.topRows(k) = prob.Aeq;
    for (size_t r = 0; r < W.size(); ++r) Aact.row(k + r) = prob.Ain.row(W[r]);
    return Aact;
  };

  Eigen::MatrixXd Z = kernelBasis(activeMatrix(), n);

  for (res.iterations = 0; res.iterations < maxIterations; ++res.iterations) {
    const int nz = static_cast<int>(Z.cols());
    Eigen::VectorXd g = prob.c;
    if (!prob.isLp()) g.noalias() += prob.F.transpose() * (prob.F * res.x);

    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    bool linearDescent = false;
    if (nz > 0) {
      const Eigen::VectorXd gr = Z.transpose() * g;
      if (prob.isLp()) {
        if (gr.lpNorm<Eigen::Infinity>() > multTol) {
          p = -Z * gr;
          linearDescent = true;
        }
      } else {
        // Reduced problem min 0.5||A q||^2 + gr^T q with A = F Z; solved
        // through the thin SVD so a singular reduced Hessian is fine.
        const Eigen::MatrixXd A = prob.F * Z;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smax = svd.singularValues().size()
                                ? svd.singularValues()[0]
                                : 0.0;
        const Eigen::VectorXd Vg = svd.matrixV().transpose() * gr;
        Eigen::VectorXd scaled = Vg;
        int effRank = 0;
        for (int i = 0; i < scaled.size(); ++i) {
          const double s = svd.singularValues()[i];
          if (s > 1e-12 * std::max(1.0, smax)) {
            scaled[i] /= s * s;
            ++effRank;
          } else {
            scaled[i] = 0.0;
          }
        }
        const Eigen::VectorXd q = -(svd.matrixV() * scaled);
        // Component of the gradient in ker(A^T A): descend linearly.
        Eigen::VectorXd kerg = gr;
        kerg.noalias() -=
            svd.matrixV().leftCols(effRank) * Vg.head(effRank);
        if (kerg.norm() > 1e-9 * (gr.norm() + 1.0)) {
          p = -Z * kerg;
          linearDescent = true;
        } else if (q.lpNorm<Eigen::Infinity>() > stepTol) {
          p = Z * q;
        }
      }
    }

    if (p.lpNorm<Eigen::Infinity>() <= stepTol) {
      // Lagrange multipliers: least-squares solve of Aact^T mu = -g.
      const Eigen::MatrixXd Aact = activeMatrix();
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(
          Aact.transpose());
      const Eigen::VectorXd mu = cod.solve(-g);
      int dropPos = -1;
      double worst = -multTol;
      for (size_t r = 0; r < W.size(); ++r) {
        // W is sorted, so ties keep the smallest row index.
        const double lambda = mu[k + r];
        if (lambda < worst) {
          worst = lambda;
          dropPos = static_cast<int>(r);
        }
      }
      if (dropPos < 0) {
        res.optimal = true;
        break;
      }
      inW[W[dropPos]] = 0;
      W.erase(W.begin() + dropPos);
      Z = kernelBasis(activeMatrix(), n);
      continue;
    }

    // Largest feasible step; blocking row with the smallest index wins ties.
    double alphaMax = linearDescent ? kInf : 1.0;
    int blocker = -1;
    const Eigen::VectorXd Ap = prob.Ain * p;
    const Eigen::VectorXd slack = prob.bin - prob.Ain * res.x;
    const double dirTol = 1e-13 * std::max(1.0, p.norm());
    for (int j = 0; j < m; ++j) {
      if (inW[j] || Ap[j] <= dirTol) continue;
      const double a = std::max(0.0, slack[j]) / Ap[j];
      if (a < alphaMax - 1e-12 * (1.0 + std::min(alphaMax, 1e6))) {
        alphaMax = a;
        blocker = j;
      }
    }
    if (!std::isfinite(alphaMax))
      throw SolverStalled("active-set: descent direction is unbounded");

    res.x += alphaMax * p;
    if (blocker >= 0 && (linearDescent || alphaMax < 1.0)) {
      inW[blocker] = 1;
      W.insert(std::lower_bound(W.begin(), W.end(), blocker), blocker);
      shrinkKernel(Z, prob.Ain.row(blocker).transpose());
    }
  }

  // Snap the active rows back to equality to undo roundoff drift.
  {
    const Eigen::MatrixXd Aact = activeMatrix();
    if (Aact.rows() > 0) {
      Eigen::VectorXd bact(Aact.rows());
      if (k > 0) bact.head(k) = prob.beq;
      for (size_t r = 0; r < W.size(); ++r) bact[k + r] = prob.bin[W[r]];
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Aact);
      res.x += cod.solve(bact - Aact * res.x);
    }
  }

  res.active = W;
  return res;
}

}  // namespace expofront::detail
