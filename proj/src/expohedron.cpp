#include "expofront/expohedron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace expofront {

Expohedron::Expohedron(std::vector<double> gamma) : gamma_(std::move(gamma)) {
  if (gamma_.empty()) throw InvalidArgument("empty exposure vector");
  for (size_t k = 0; k + 1 < gamma_.size(); ++k)
    if (!(gamma_[k] >= gamma_[k + 1]))
      throw InvalidArgument("exposure weights must be non-increasing");
  ghat_.resize(gamma_.size());
  std::partial_sum(gamma_.begin(), gamma_.end(), ghat_.begin());
  scale_ = std::max(1.0, ghat_.back());
}

std::vector<int> Expohedron::sortedOrder(const std::vector<double>& x) const {
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x[a] > x[b]; });
  return order;
}

Membership Expohedron::check(const std::vector<double>& x, double tol) const {
  tol = resolveTol(tol);
  const int n = dim();
  if (static_cast<int>(x.size()) != n)
    throw DimensionError("point/gamma size mismatch");

  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (std::abs(total - ghat_[n - 1]) > tol)
    throw NotOnSumHyperplane("point total " + std::to_string(total) +
                             " != total exposure " +
                             std::to_string(ghat_[n - 1]));

  Membership m;
  const std::vector<int> order = sortedOrder(x);
  double prefix = 0.0;
  for (int k = 1; k < n; ++k) {
    prefix += x[order[k - 1]];
    const double diff = prefix - ghat_[k - 1];
    if (diff > tol)
      m.violatedLevels.push_back(k);
    else if (std::abs(diff) <= tol)
      m.tightLevels.push_back(k);
  }
  if (!m.violatedLevels.empty())
    m.region = Region::Outside;
  else if (!m.tightLevels.empty())
    m.region = Region::Boundary;
  else
    m.region = Region::Interior;
  return m;
}

FaceDescriptor Expohedron::faceOf(const std::vector<double>& x,
                                  double tol) const {
  tol = resolveTol(tol);
  const Membership m = check(x, tol);
  if (!m.inside()) throw NotInPolytope("faceOf: point violates majorization");

  FaceDescriptor face;
  face.tightLevels = m.tightLevels;
  const std::vector<int> order = sortedOrder(x);
  int start = 0;
  for (int level : m.tightLevels) {
    face.blocks.emplace_back(order.begin() + start, order.begin() + level);
    start = level;
  }
  face.blocks.emplace_back(order.begin() + start, order.end());
  return face;
}

double Expohedron::maxPrefixViolation(const std::vector<double>& x) const {
  const std::vector<int> order = sortedOrder(x);
  double prefix = 0.0, worst = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < dim(); ++k) {
    prefix += x[order[k - 1]];
    worst = std::max(worst, prefix - ghat_[k - 1]);
  }
  return dim() == 1 ? 0.0 : worst;
}

RayHit Expohedron::rayBoundaryIntersection(const std::vector<double>& x,
                                           const std::vector<double>& d,
                                           double tol) const {
  tol = resolveTol(tol);
  const int n = dim();
  if (static_cast<int>(d.size()) != n)
    throw DimensionError("direction/gamma size mismatch");

  double dNorm = 0.0, dSum = 0.0;
  for (double v : d) {
    dNorm += v * v;
    dSum += v;
  }
  dNorm = std::sqrt(dNorm);
  if (dNorm <= tol) throw ZeroDirection("direction has near-zero norm");
  if (std::abs(dSum) > tol)
    throw OffHyperplaneDirection("direction has nonzero total sum");
  if (!check(x, tol).inside())
    throw NotInPolytope("ray start violates majorization");

  auto pointAt = [&](double t) {
    std::vector<double> y(x);
    for (int i = 0; i < n; ++i) y[i] += t * d[i];
    return y;
  };
  auto feasible = [&](double t) { return maxPrefixViolation(pointAt(t)) <= tol; };

  // Bracket the exit by doubling, then bisect the convex piecewise-linear
  // violation down to a width of 1e-12 * scale.
  double lo = 0.0, hi = scale_ / dNorm;
  int guard = 0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200)
      throw Error("rayBoundaryIntersection: no exit found (unbounded ray?)");
  }
  const double width = 1e-12 * scale_;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }

  // Polish: under the item order at the feasible end the prefix sums are
  // linear in t; solve the binding level exactly.
  double tStar = lo;
  {
    const std::vector<double> y = pointAt(lo);
    const std::vector<int> order = sortedOrder(y);
    double px = 0.0, pd = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k < n; ++k) {
      px += x[order[k - 1]];
      pd += d[order[k - 1]];
      if (pd > 1e-15 * dNorm) {
        const double root = (ghat_[k - 1] - px) / pd;
        if (root >= lo - 10.0 * width && root < best) best = root;
      }
    }
    if (std::isfinite(best) && best <= hi + 10.0 * width && feasible(best))
      tStar = best;
  }

  return RayHit{tStar, pointAt(tStar)};
}

SphereFrame Expohedron::sphereFrame() const {
  const int n = dim();
  SphereFrame frame;
  frame.center.assign(n, ghat_[n - 1] / n);
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double diff = gamma_[i] - frame.center[i];
    r2 += diff * diff;
  }
  frame.radius = std::sqrt(r2);
  if (frame.radius <= 1e-12 * scale_)
    throw DegenerateSphere("all exposure weights equal; sphere has radius 0");
  return frame;
}

std::vector<double> Expohedron::projectToSphere(const std::vector<double>& x,
                                                const SphereFrame& frame) const {
  const int n = dim();
  if (static_cast<int>(x.size()) != n)
    throw DimensionError("point/gamma size mismatch");
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    const double diff = x[i] - frame.center[i];
    r += diff * diff;
  }
  r = std::sqrt(r);
  if (r <= 1e-12 * scale_)
    throw CenterProjection("cannot project the sphere center");
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i)
    p[i] = frame.center[i] + frame.radius / r * (x[i] - frame.center[i]);
  return p;
}

std::vector<double> Expohedron::projectSphereToBoundary(
    const std::vector<double>& p, const SphereFrame& frame) const {
  const int n = dim();
  if (static_cast<int>(p.size()) != n)
    throw DimensionError("point/gamma size mismatch");
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    const double diff = p[i] - frame.center[i];
    r += diff * diff;
  }
  r = std::sqrt(r);
  if (std::abs(r - frame.radius) > 1e-6 * scale_)
    throw InvalidArgument("point is not on the circumscribed sphere");
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = p[i] - frame.center[i];
  return rayBoundaryIntersection(frame.center, d).point;
}

std::vector<double> Expohedron::maxUtilityVertex(
    const std::vector<double>& rho) const {
  return prpRanking(rho).exposure(gamma_);
}

Permutation Expohedron::prpRanking(const std::vector<double>& rho) const {
  if (static_cast<int>(rho.size()) != dim())
    throw DimensionError("relevance/gamma size mismatch");
  std::vector<int> order(rho.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rho[a] > rho[b]; });
  return Permutation(order);
}

}  // namespace expofront
