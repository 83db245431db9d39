#pragma once

#include <vector>

#include "expofront/core.hpp"

namespace expofront {

enum class Region { Interior, Boundary, Outside };

struct Membership {
  Region region = Region::Interior;
  std::vector<int> tightLevels;     // k in 1..n-1 with |S_k - Ghat_k| <= tol
  std::vector<int> violatedLevels;  // k in 1..n-1 with S_k - Ghat_k > tol

  bool inside() const { return region != Region::Outside; }
};

/// A face of the exposure polytope as an ordered partition of the items.
/// Items in blocks[0] carry the largest exposures; tightLevels are the
/// prefix sizes at which the majorization bound holds with equality for
/// the describing point.
struct FaceDescriptor {
  std::vector<std::vector<int>> blocks;
  std::vector<int> tightLevels;

  int blockCount() const { return static_cast<int>(blocks.size()); }
};

struct SphereFrame {
  std::vector<double> center;
  double radius = 0.0;
};

struct RayHit {
  double t = 0.0;
  std::vector<double> point;
};

/// The permutahedron spanned by the coordinate permutations of gamma:
/// exactly the expected exposure vectors attainable by distributions over
/// rankings under a position-based model. Membership is the majorization
/// test x <= gamma (top-k partial sums bounded by the k largest weights,
/// totals equal).
class Expohedron {
 public:
  explicit Expohedron(std::vector<double> gamma);

  const std::vector<double>& gamma() const { return gamma_; }
  int dim() const { return static_cast<int>(gamma_.size()); }
  double totalExposure() const { return ghat_.back(); }
  /// Scale used for default tolerances: max(1, ||gamma||_1).
  double scale() const { return scale_; }
  /// Sum of the k largest exposure weights (k in 1..n).
  double prefixBound(int k) const { return ghat_[k - 1]; }
  double defaultTol() const { return 1e-9 * scale_; }

  /// Item indices ordered by descending x, ties by smaller index.
  std::vector<int> sortedOrder(const std::vector<double>& x) const;

  /// Classifies x against the polytope. Throws NotOnSumHyperplane when the
  /// total sum is off by more than tol.
  Membership check(const std::vector<double>& x, double tol = -1.0) const;

  /// Face of the feasible point x. Throws NotInPolytope.
  FaceDescriptor faceOf(const std::vector<double>& x, double tol = -1.0) const;

  /// Largest t >= 0 with x + t*d feasible, for a zero-sum direction d.
  /// The returned point lies on the newly tight constraints.
  RayHit rayBoundaryIntersection(const std::vector<double>& x,
                                 const std::vector<double>& d,
                                 double tol = -1.0) const;

  /// Circumscribed sphere: all vertices are equidistant from the barycenter.
  SphereFrame sphereFrame() const;

  /// Central projection of x onto the circumscribed sphere.
  std::vector<double> projectToSphere(const std::vector<double>& x,
                                      const SphereFrame& frame) const;

  /// Inverse of the central projection: the unique boundary point on the
  /// ray from the center through the sphere point p.
  std::vector<double> projectSphereToBoundary(const std::vector<double>& p,
                                              const SphereFrame& frame) const;

  /// Exposure of the relevance-sorted ranking (largest weight to the most
  /// relevant item; ties broken by smaller item index).
  std::vector<double> maxUtilityVertex(const std::vector<double>& rho) const;

  /// The relevance-sorted ranking itself.
  Permutation prpRanking(const std::vector<double>& rho) const;

 private:
  double resolveTol(double tol) const { return tol < 0.0 ? defaultTol() : tol; }
  /// max over k in 1..n-1 of (S_k(x) - Ghat_k).
  double maxPrefixViolation(const std::vector<double>& x) const;

  std::vector<double> gamma_;
  std::vector<double> ghat_;  // prefix sums of gamma
  double scale_ = 1.0;
};

}  // namespace expofront
