#include "expofront/pareto.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace expofront {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ParetoPoint makeParetoPoint(std::vector<double> exposure,
                            const QueryInstance& inst) {
  ParetoPoint p;
  p.utility = utilityOf(exposure, inst.relevance);
  p.unfairness = unfairnessOf(exposure, inst);
  p.exposure = std::move(exposure);
  return p;
}

double ParetoFront::utilityAt(double unfairness) const {
  if (points.empty()) throw EmptyFront("utilityAt on empty front");
  if (unfairness <= points.front().unfairness) return points.front().utility;
  if (unfairness >= points.back().unfairness) return points.back().utility;
  for (size_t i = 1; i < points.size(); ++i) {
    if (unfairness <= points[i].unfairness) {
      const double f0 = points[i - 1].unfairness, f1 = points[i].unfairness;
      const double u0 = points[i - 1].utility, u1 = points[i].utility;
      const double t = f1 > f0 ? (unfairness - f0) / (f1 - f0) : 1.0;
      return u0 + t * (u1 - u0);
    }
  }
  return points.back().utility;
}

ParetoFront nondominatedFront(std::vector<ParetoPoint> candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const ParetoPoint& a, const ParetoPoint& b) {
              if (a.unfairness != b.unfairness)
                return a.unfairness < b.unfairness;
              return a.utility > b.utility;
            });
  ParetoFront front;
  for (auto& c : candidates) {
    if (!front.points.empty()) {
      const ParetoPoint& prev = front.points.back();
      if (c.unfairness <= prev.unfairness + 1e-12) continue;
      if (c.utility <= prev.utility + 1e-12) continue;
    }
    front.points.push_back(std::move(c));
  }
  return front;
}

double hypervolume(const ParetoFront& front, double refUtility,
                   double refUnfairness) {
  if (front.empty()) throw EmptyFront("hypervolume of empty front");

  // Upper concave hull in the (unfairness, utility) plane.
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : front.points) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross = (b.first - a.first) * (p.utility - a.second) -
                           (p.unfairness - a.first) * (b.second - a.second);
      if (cross >= 0.0)
        hull.pop_back();  // b under the chord a->p
      else
        break;
    }
    hull.emplace_back(p.unfairness, p.utility);
  }

  double area = 0.0;
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    double f0 = hull[i].first, u0 = hull[i].second;
    double f1 = hull[i + 1].first, u1 = hull[i + 1].second;
    if (f0 >= refUnfairness) break;
    if (f1 > refUnfairness) {
      const double t = (refUnfairness - f0) / (f1 - f0);
      u1 = u0 + t * (u1 - u0);
      f1 = refUnfairness;
    }
    area += (f1 - f0) * (0.5 * (u0 + u1) - refUtility);
  }
  // Constant extension beyond the last hull point up to the reference.
  const double fLast = hull.back().first, uLast = hull.back().second;
  if (refUnfairness > fLast)
    area += (refUnfairness - fLast) * (uLast - refUtility);
  return area;
}

FaceDirection optimalDirectionOnFace(const QueryInstance& inst,
                                     const std::vector<double>& x,
                                     const FaceDescriptor& face) {
  const int n = inst.itemCount();
  const int g = inst.groupCount();
  const int m = face.blockCount();
  FaceDirection none;
  if (m >= n) return none;  // vertex: no tangent space

  Eigen::Map<const VectorXd> rho(inst.relevance.data(), n);
  const double rhoScale = 1.0 + rho.cwiseAbs().maxCoeff();
  const double tol = 1e-11 * rhoScale;

  // Block indicator rows span the normal directions of the face.
  MatrixXd Cb = MatrixXd::Zero(m, n);
  for (int bIdx = 0; bIdx < m; ++bIdx)
    for (int i : face.blocks[bIdx]) Cb(bIdx, i) = 1.0;
  MatrixXd G = MatrixXd::Zero(g, n);
  for (int i = 0; i < n; ++i) G(inst.groupOf[i], i) = 1.0;

  // Fairness-free branch: projection of rho onto ker([Cb; G]).
  MatrixXd C(m + g, n);
  C.topRows(m) = Cb;
  C.bottomRows(g) = G;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> codC(C);
  VectorXd dFree = rho - codC.solve(C * rho);
  if (dFree.norm() > 1e-9 * rhoScale) {
    FaceDirection res;
    res.valid = true;
    res.slope = kInf;
    dFree /= dFree.norm();
    res.direction.assign(dFree.data(), dFree.data() + n);
    return res;
  }

  // Tangency branch: d in ker(Cb) with proj(G^T G d) parallel to proj(rho).
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Cb.transpose());
  const int rank = static_cast<int>(qr.rank());
  const int nz = n - rank;
  if (nz <= 0) return none;
  MatrixXd sel = MatrixXd::Zero(n, nz);
  for (int j = 0; j < nz; ++j) sel(rank + j, j) = 1.0;
  const MatrixXd Z = qr.householderQ() * sel;

  const MatrixXd A = G * Z;                 // g x nz
  const MatrixXd Mred = A.transpose() * A;  // reduced quadratic form
  const VectorXd gr = Z.transpose() * rho;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> codM(Mred);
  const VectorXd q = codM.solve(gr);
  VectorXd d = Z * q;
  const double dn = d.norm();
  if (dn <= 1e-12 * rhoScale) return none;
  d /= dn;

  const double rhoD = rho.dot(d);
  if (rhoD <= tol) return none;

  VectorXd r(g);
  {
    const std::vector<double> sums = groupExposure(x, inst.groupOf, g);
    for (int j = 0; j < g; ++j) r[j] = sums[j] - inst.targetExposure[j];
  }
  const VectorXd Gd = G * d;
  const double gdNorm = Gd.norm();
  const double rNorm = r.norm();
  const double scale = 1.0 + std::abs(inst.exposureWeights[0]) * n;

  FaceDirection res;
  res.valid = true;
  res.direction.assign(d.data(), d.data() + n);
  if (rNorm <= 1e-9 * scale) {
    res.slope = gdNorm > 1e-12 ? rhoD / gdNorm : kInf;
    return res;
  }
  const double rGd = r.dot(Gd);
  const double cross = 1e-12 * (rNorm * gdNorm + 1.0);
  if (rGd < -cross) return none;  // moving toward fairness, not a trade-off
  res.slope = rGd <= cross ? kInf : rhoD * rNorm / rGd;
  return res;
}

namespace {

struct WalkCandidate {
  FaceDirection dir;
  int tightCount = 0;
  std::vector<std::vector<int>> blocks;
};

bool betterCandidate(const WalkCandidate& a, const WalkCandidate& b) {
  const double sa = a.dir.slope, sb = b.dir.slope;
  const bool tie =
      (std::isinf(sa) && std::isinf(sb)) ||
      std::abs(sa - sb) <= 1e-12 * (1.0 + std::min(std::abs(sa), 1e12));
  if (!tie) return sa > sb;
  if (a.tightCount != b.tightCount) return a.tightCount > b.tightCount;
  return a.blocks < b.blocks;
}

FaceDescriptor dropTightLevel(const FaceDescriptor& face, int levelIdx) {
  FaceDescriptor adj;
  for (int i = 0; i < face.blockCount(); ++i) {
    if (i == levelIdx + 1) {
      // Merge with the previous block; order within follows the original.
      auto& prev = adj.blocks.back();
      prev.insert(prev.end(), face.blocks[i].begin(), face.blocks[i].end());
    } else {
      adj.blocks.push_back(face.blocks[i]);
    }
  }
  for (int j = 0; j < static_cast<int>(face.tightLevels.size()); ++j)
    if (j != levelIdx) adj.tightLevels.push_back(face.tightLevels[j]);
  return adj;
}

}  // namespace

ParetoFront pexpoFront(const QueryInstance& inst) {
  validateInstance(inst);
  MajorizationSolver solver(inst);
  const Expohedron& poly = solver.polytope();
  const int n = poly.dim();
  const double probeStep = 1e-7 * poly.scale();
  const double prpUtility = solver.prpUtility();

  std::vector<double> x = solver.startPoint();
  std::vector<ParetoPoint> points;
  points.push_back(makeParetoPoint(x, inst));

  std::vector<std::string> visited;
  const int guard = 4 * n * n + 8;
  int iter = 0;
  for (; iter < guard; ++iter) {
    if (utilityOf(x, inst.relevance) >= prpUtility - 1e-9) break;

    const FaceDescriptor face = poly.faceOf(x);
    {
      std::ostringstream os;
      for (int lvl : face.tightLevels) os << lvl << ' ';
      visited.push_back(os.str());
    }

    std::vector<FaceDescriptor> facesToTry;
    facesToTry.push_back(face);
    for (int j = 0; j < static_cast<int>(face.tightLevels.size()); ++j)
      facesToTry.push_back(dropTightLevel(face, j));

    std::vector<WalkCandidate> candidates;
    for (const auto& f : facesToTry) {
      FaceDirection dir = optimalDirectionOnFace(inst, x, f);
      if (!dir.valid) continue;
      // Forward feasibility probe: reject directions exiting the polytope.
      std::vector<double> probe(x);
      for (int i = 0; i < n; ++i) probe[i] += probeStep * dir.direction[i];
      bool inside = false;
      try {
        inside = poly.check(probe).inside();
      } catch (const NotOnSumHyperplane&) {
        inside = false;
      }
      if (!inside) continue;
      candidates.push_back({std::move(dir), static_cast<int>(f.tightLevels.size()),
                            f.blocks});
    }
    if (candidates.empty()) break;
    std::sort(candidates.begin(), candidates.end(), betterCandidate);

    bool advanced = false;
    for (const auto& cand : candidates) {
      const RayHit hit = poly.rayBoundaryIntersection(x, cand.dir.direction);
      if (hit.t <= 1e-10 * poly.scale()) continue;
      x = hit.point;
      points.push_back(makeParetoPoint(x, inst));
      advanced = true;
      break;
    }
    if (!advanced) break;
  }
  if (iter >= guard) {
    std::ostringstream os;
    os << "facet walk exceeded " << guard << " iterations; visited faces: ";
    for (const auto& v : visited) os << '[' << v << "] ";
    throw NonTermination(os.str());
  }

  return nondominatedFront(std::move(points));
}

GeodesicArc::GeodesicArc(const std::vector<double>& p,
                         const std::vector<double>& q,
                         const SphereFrame& frame)
    : center_(frame.center), radius_(frame.radius) {
  const size_t n = frame.center.size();
  if (p.size() != n || q.size() != n)
    throw DimensionError("arc endpoint dimension mismatch");
  u_.resize(n);
  w_.resize(n);
  double dot = 0.0;
  for (size_t i = 0; i < n; ++i) {
    u_[i] = (p[i] - center_[i]) / radius_;
    w_[i] = (q[i] - center_[i]) / radius_;
    dot += u_[i] * w_[i];
  }
  dot = std::clamp(dot, -1.0, 1.0);
  omega_ = std::acos(dot);
  if (omega_ <= 1e-9) throw DegenerateArc("coincident arc endpoints");
  if (M_PI - omega_ <= 1e-9) throw DegenerateArc("antipodal arc endpoints");
}

std::vector<double> GeodesicArc::sample(double t) const {
  const double s = std::sin(omega_);
  const double a = std::sin((1.0 - t) * omega_) / s;
  const double b = std::sin(t * omega_) / s;
  std::vector<double> out(center_.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = center_[i] + radius_ * (a * u_[i] + b * w_[i]);
  return out;
}

namespace {

double arcAngle(const std::vector<double>& p, const std::vector<double>& q,
                const SphereFrame& frame) {
  double dot = 0.0, np = 0.0, nq = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double a = p[i] - frame.center[i];
    const double b = q[i] - frame.center[i];
    dot += a * b;
    np += a * a;
    nq += b * b;
  }
  if (np <= 0.0 || nq <= 0.0) return 0.0;
  return std::acos(std::clamp(dot / std::sqrt(np * nq), -1.0, 1.0));
}

}  // namespace

SphereExpoResult sphereExpoProfile(const QueryInstance& inst, int rounds,
                                   int samplesPerArc) {
  if (rounds < 0) throw InvalidArgument("rounds must be >= 0");
  if (samplesPerArc < 2) throw InvalidArgument("need at least 2 samples per arc");
  validateInstance(inst);

  SphereExpoResult result;
  const int n = inst.itemCount();
  if (n <= 2) {
    // The circumscribed sphere is S^0; geodesics are undefined. The exact
    // walk is a single segment here, so return it directly.
    result.front = pexpoFront(inst);
    return result;
  }

  MajorizationSolver solver(inst);
  const Expohedron& poly = solver.polytope();
  const SphereFrame frame = poly.sphereFrame();

  const std::vector<double> xF = solver.startPoint();
  const std::vector<double>& xP = solver.prpVertex();
  const double uFStart = utilityOf(xF, inst.relevance);
  const double uPrp = solver.prpUtility();

  std::vector<ParetoPoint> candidates;
  candidates.push_back(makeParetoPoint(xF, inst));
  candidates.push_back(makeParetoPoint(xP, inst));

  std::vector<double> s0, e0;
  bool haveSphere = true;
  try {
    s0 = poly.projectToSphere(xF, frame);
    e0 = poly.projectToSphere(xP, frame);
  } catch (const CenterProjection&) {
    haveSphere = false;  // fairness optimum at the barycenter
  }

  if (haveSphere && arcAngle(s0, e0, frame) > 1e-9) {
    using Arc = std::pair<std::vector<double>, std::vector<double>>;
    std::vector<Arc> queue{{s0, e0}};
    std::vector<Arc> generations;

    for (int round = 0; round < rounds; ++round) {
      std::vector<Arc> next;
      for (auto& [s, e] : queue) {
        generations.emplace_back(s, e);
        double uMid;
        try {
          const GeodesicArc arc(s, e, frame);
          const std::vector<double> midBoundary =
              poly.projectSphereToBoundary(arc.sample(0.5), frame);
          uMid = utilityOf(midBoundary, inst.relevance);
        } catch (const DegenerateArc&) {
          next.emplace_back(s, e);
          continue;
        }
        uMid = std::clamp(uMid, uFStart, uPrp);
        const std::vector<double> marked = solver.minUnfairnessAtUtility(uMid);
        result.markedPoints.push_back(makeParetoPoint(marked, inst));
        std::vector<double> sm;
        try {
          sm = poly.projectToSphere(marked, frame);
        } catch (const CenterProjection&) {
          next.emplace_back(s, e);
          continue;
        }
        if (arcAngle(s, sm, frame) > 1e-12) next.emplace_back(s, sm);
        if (arcAngle(sm, e, frame) > 1e-12) next.emplace_back(sm, e);
      }
      queue = std::move(next);
    }
    for (auto& arc : queue) generations.push_back(std::move(arc));

    for (const auto& [s, e] : generations) {
      GeodesicArc arc(s, e, frame);
      for (int j = 0; j < samplesPerArc; ++j) {
        const double t = static_cast<double>(j) / (samplesPerArc - 1);
        const std::vector<double> p = arc.sample(t);
        candidates.push_back(
            makeParetoPoint(poly.projectSphereToBoundary(p, frame), inst));
      }
    }
  }
  for (const auto& mp : result.markedPoints) candidates.push_back(mp);

  result.front = nondominatedFront(std::move(candidates));
  result.utilityQpSolves = solver.utilitySolveCount();
  return result;
}

ParetoFront sphereExpoFront(const QueryInstance& inst, int rounds,
                            int samplesPerArc) {
  return sphereExpoProfile(inst, rounds, samplesPerArc).front;
}

ParetoFront qpSweepFront(const QueryInstance& inst, int gridPoints) {
  if (gridPoints < 2) throw InvalidArgument("need at least 2 grid points");
  validateInstance(inst);
  MajorizationSolver solver(inst);
  const double u0 = utilityOf(solver.startPoint(), inst.relevance);
  const double u1 = solver.prpUtility();

  std::vector<ParetoPoint> points;
  for (int i = 0; i < gridPoints; ++i) {
    const double t = static_cast<double>(i) / (gridPoints - 1);
    const double u = u0 + t * (u1 - u0);
    points.push_back(makeParetoPoint(solver.minUnfairnessAtUtility(u), inst));
  }
  return nondominatedFront(std::move(points));
}

FrontGap frontGap(const ParetoFront& approx, const ParetoFront& exact) {
  if (approx.empty() || exact.empty())
    throw EmptyFront("frontGap requires non-empty fronts");

  double refU = kInf, refF = -kInf;
  for (const auto* f : {&approx, &exact})
    for (const auto& p : f->points) {
      refU = std::min(refU, p.utility);
      refF = std::max(refF, p.unfairness);
    }

  FrontGap gap;
  gap.hypervolumeGap =
      std::abs(hypervolume(exact, refU, refF) - hypervolume(approx, refU, refF));
  double worst = -kInf;
  for (const auto& p : approx.points)
    worst = std::max(worst, exact.utilityAt(p.unfairness) - p.utility);
  gap.maxUtilityGap = worst;
  return gap;
}

}  // namespace expofront
