#pragma once

#include <vector>

#include "expofront/convex.hpp"
#include "expofront/core.hpp"
#include "expofront/expohedron.hpp"

namespace expofront {

struct ParetoPoint {
  std::vector<double> exposure;
  double utility = 0.0;
  double unfairness = 0.0;
};

ParetoPoint makeParetoPoint(std::vector<double> exposure,
                            const QueryInstance& inst);

/// Trade-off curve: points ordered by strictly increasing unfairness and
/// increasing utility. First point is the fairness optimum, last the PRP
/// point when the front is complete.
struct ParetoFront {
  std::vector<ParetoPoint> points;

  bool empty() const { return points.empty(); }
  const ParetoPoint& first() const { return points.front(); }
  const ParetoPoint& last() const { return points.back(); }

  /// Piecewise-linear utility at an unfairness level, clamped to the range.
  double utilityAt(double unfairness) const;
};

/// Keeps the non-dominated points, ordered by unfairness.
ParetoFront nondominatedFront(std::vector<ParetoPoint> candidates);

/// Area dominated by the mixture closure (upper concave hull) of the front
/// relative to the reference corner (refUtility, refUnfairness). Mixing
/// distributions realizes every chord, so the hull is attainable.
double hypervolume(const ParetoFront& front, double refUtility,
                   double refUnfairness);

struct FaceDirection {
  bool valid = false;
  std::vector<double> direction;  // unit vector in the face tangent space
  double slope = 0.0;             // dU/dF; +inf when unfairness is unchanged
};

/// Best utility-per-unfairness direction within a face: the projection of
/// the relevance onto the fairness-free tangent directions when nonzero,
/// otherwise the tangency ray of the utility hyperplanes with the
/// concentric unfairness level sets on the face.
FaceDirection optimalDirectionOnFace(const QueryInstance& inst,
                                     const std::vector<double>& x,
                                     const FaceDescriptor& face);

/// Exact front by walking facets from the fairness optimum to the PRP
/// vertex, taking the max-slope direction among the current face and all
/// one-level relaxations, advancing to each break point.
ParetoFront pexpoFront(const QueryInstance& inst);

/// Great-circle arc between two points of the circumscribed sphere.
class GeodesicArc {
 public:
  GeodesicArc(const std::vector<double>& p, const std::vector<double>& q,
              const SphereFrame& frame);

  double angle() const { return omega_; }
  std::vector<double> sample(double t) const;

 private:
  std::vector<double> center_;
  double radius_ = 0.0;
  double omega_ = 0.0;
  std::vector<double> u_, w_;  // unit offsets of the endpoints
};

struct SphereExpoResult {
  ParetoFront front;
  std::vector<ParetoPoint> markedPoints;  // true front points from Eq-style QPs
  int utilityQpSolves = 0;
};

/// Approximate front: split the geodesic between the sphere images of the
/// fairness optimum and the PRP vertex at QP-certified marked points for
/// `rounds` rounds, then sample every arc generation, project to the
/// boundary and keep the non-dominated set. Marked points are nested
/// across rounds and the candidate set grows with `rounds`.
SphereExpoResult sphereExpoProfile(const QueryInstance& inst, int rounds,
                                   int samplesPerArc);
ParetoFront sphereExpoFront(const QueryInstance& inst, int rounds,
                            int samplesPerArc);

/// Oracle front: fixed-utility QP solves on a uniform utility grid.
ParetoFront qpSweepFront(const QueryInstance& inst, int gridPoints);

struct FrontGap {
  double hypervolumeGap = 0.0;
  double maxUtilityGap = 0.0;
};

/// Hypervolume difference (shared reference corner) and the worst utility
/// shortfall of `approx` against `exact` across the approx unfairness levels.
FrontGap frontGap(const ParetoFront& approx, const ParetoFront& exact);

}  // namespace expofront
