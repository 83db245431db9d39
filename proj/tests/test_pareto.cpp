#include <doctest.h>

#include <cmath>
#include <random>

#include "expofront/harness.hpp"
#include "expofront/pareto.hpp"
#include "support/simplex_oracle.hpp"
#include "support/toys.hpp"

using namespace expofront;
using testsupport::toy2;
using testsupport::toy3;

namespace {

QueryInstance singleGroup3() {
  QueryInstance inst;
  inst.queryId = "single-group";
  inst.relevance = {0.8, 0.5, 0.2};
  inst.groupOf = {0, 0, 0};
  inst.exposureWeights = dcgExposure(3);
  return withTarget(std::move(inst), {TargetPolicy::SizeProportional, {}});
}

void checkFrontInvariants(const ParetoFront& front, const QueryInstance& inst) {
  REQUIRE(!front.empty());
  const Expohedron poly(inst.exposureWeights);
  for (size_t i = 0; i < front.points.size(); ++i) {
    const auto& p = front.points[i];
    CHECK(p.utility ==
          doctest::Approx(utilityOf(p.exposure, inst.relevance)).epsilon(1e-12));
    CHECK(p.unfairness ==
          doctest::Approx(unfairnessOf(p.exposure, inst)).epsilon(1e-12));
    CHECK(poly.check(p.exposure, 1e-7).inside());
    if (i > 0) {
      CHECK(p.unfairness > front.points[i - 1].unfairness);
      CHECK(p.utility >= front.points[i - 1].utility);
    }
  }
}

}  // namespace

TEST_CASE("optimalDirectionOnFace") {
  SUBCASE("toy2 at the center, full polytope") {
    const QueryInstance inst = toy2();
    const Expohedron poly(inst.exposureWeights);
    const FaceDescriptor face = poly.faceOf({0.75, 0.75});
    const FaceDirection dir = optimalDirectionOnFace(inst, {0.75, 0.75}, face);
    REQUIRE(dir.valid);
    CHECK(dir.direction[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(dir.direction[1] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-9));
    CHECK(dir.slope == doctest::Approx(0.565685).epsilon(1e-5));
  }
  SUBCASE("single group: every direction is fairness-free") {
    const QueryInstance inst = singleGroup3();
    const Expohedron poly(inst.exposureWeights);
    const double c = poly.totalExposure() / 3;
    const FaceDescriptor face = poly.faceOf({c, c, c});
    const FaceDirection dir = optimalDirectionOnFace(inst, {c, c, c}, face);
    REQUIRE(dir.valid);
    CHECK(std::isinf(dir.slope));
    CHECK(utilityOf(dir.direction, inst.relevance) > 0.0);
  }
  SUBCASE("a vertex has no tangent space") {
    const QueryInstance inst = toy2();
    const Expohedron poly(inst.exposureWeights);
    const FaceDescriptor face = poly.faceOf({1.0, 0.5});
    CHECK_FALSE(optimalDirectionOnFace(inst, {1.0, 0.5}, face).valid);
  }
}

TEST_CASE("pexpoFront") {
  SUBCASE("toy2 is a single segment") {
    const ParetoFront front = pexpoFront(toy2());
    checkFrontInvariants(front, toy2());
    REQUIRE(front.points.size() == 2);
    CHECK(front.first().utility == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(front.first().unfairness == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(front.last().utility == doctest::Approx(1.1).epsilon(1e-6));
    CHECK(front.last().unfairness ==
          doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-6));
    CHECK(front.first().exposure[0] == doctest::Approx(0.75).epsilon(1e-7));
    CHECK(front.last().exposure[0] == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("single-group instances collapse to the PRP point") {
    const ParetoFront front = pexpoFront(singleGroup3());
    REQUIRE(front.points.size() == 1);
    const Expohedron poly(singleGroup3().exposureWeights);
    CHECK(front.first().utility ==
          doctest::Approx(utilityOf(poly.maxUtilityVertex(singleGroup3().relevance),
                                    singleGroup3().relevance))
              .epsilon(1e-9));
    CHECK(front.first().unfairness <= 1e-9);
  }
  SUBCASE("toy3 walks through the intermediate vertex") {
    const QueryInstance inst = toy3();
    const ParetoFront front = pexpoFront(inst);
    checkFrontInvariants(front, inst);
    REQUIRE(front.points.size() == 3);
    const double g3 = 1.0 / std::log2(3.0);
    CHECK(front.points[0].utility == doctest::Approx(1.199589).epsilon(1e-5));
    CHECK(front.points[0].unfairness <= 1e-7);
    CHECK(front.points[1].utility ==
          doctest::Approx(0.9 + 0.3 + 0.1 * g3).epsilon(1e-6));
    CHECK(front.points[2].utility ==
          doctest::Approx(0.9 + 0.6 * g3 + 0.05).epsilon(1e-9));
    CHECK(front.points[2].unfairness == doctest::Approx(0.297423).epsilon(1e-5));
  }
}

TEST_CASE("geodesic arcs") {
  const Expohedron poly({3.0, 2.0, 1.0});
  const SphereFrame frame = poly.sphereFrame();
  SUBCASE("endpoints are reproduced") {
    const std::vector<double> p{3, 2, 1}, q{1, 2, 3};
    const GeodesicArc arc(p, q, frame);
    const auto s0 = arc.sample(0.0);
    const auto s1 = arc.sample(1.0);
    for (int i = 0; i < 3; ++i) {
      CHECK(s0[i] == doctest::Approx(p[i]).epsilon(1e-12));
      CHECK(s1[i] == doctest::Approx(q[i]).epsilon(1e-12));
    }
  }
  SUBCASE("all samples stay on the sphere") {
    const GeodesicArc arc({3, 2, 1}, {2, 3, 1}, frame);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto s = arc.sample(t);
      double r = 0.0;
      for (int i = 0; i < 3; ++i)
        r += (s[i] - frame.center[i]) * (s[i] - frame.center[i]);
      CHECK(std::sqrt(r) == doctest::Approx(frame.radius).epsilon(1e-12));
    }
  }
  SUBCASE("degenerate arcs are rejected") {
    CHECK_THROWS_AS(GeodesicArc({3, 2, 1}, {3, 2, 1}, frame), DegenerateArc);
    CHECK_THROWS_AS(GeodesicArc({3, 2, 1}, {1, 2, 3}, frame), DegenerateArc);
  }
}

TEST_CASE("sphereExpoFront") {
  SUBCASE("no rounds, two samples: just the endpoints") {
    const ParetoFront front = sphereExpoFront(toy3(), 0, 2);
    checkFrontInvariants(front, toy3());
    REQUIRE(front.points.size() == 2);
    CHECK(front.first().unfairness <= 1e-7);
    CHECK(front.last().utility == doctest::Approx(1.328558).epsilon(1e-5));
  }
  SUBCASE("marked points lie on the exact front") {
    const SphereExpoResult prof = sphereExpoProfile(toy3(), 1, 3);
    REQUIRE(prof.markedPoints.size() == 1);
    const ParetoFront exact = pexpoFront(toy3());
    const auto& mp = prof.markedPoints[0];
    CHECK(std::abs(exact.utilityAt(mp.unfairness) - mp.utility) <= 1e-6);
  }
  SUBCASE("n = 2 bypasses the sphere machinery") {
    const ParetoFront front = sphereExpoFront(toy2(), 2, 4);
    const ParetoFront exact = pexpoFront(toy2());
    REQUIRE(front.points.size() == exact.points.size());
    for (size_t i = 0; i < front.points.size(); ++i) {
      CHECK(front.points[i].utility ==
            doctest::Approx(exact.points[i].utility).epsilon(1e-12));
    }
  }
  SUBCASE("gap to the exact front shrinks with more rounds") {
    const auto instances = genSynthetic(SyntheticKind::Small, 3, 41);
    for (const auto& inst : instances) {
      const ParetoFront exact = pexpoFront(inst);
      double prev = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 3; ++k) {
        const ParetoFront approx = sphereExpoFront(inst, k, 5);
        checkFrontInvariants(approx, inst);
        const double gap = frontGap(approx, exact).hypervolumeGap;
        CHECK(gap <= prev + 1e-9);
        prev = gap;
      }
    }
  }
}

TEST_CASE("qpSweepFront") {
  SUBCASE("toy2 three-point sweep") {
    const ParetoFront front = qpSweepFront(toy2(), 3);
    REQUIRE(front.points.size() == 3);
    CHECK(front.points[0].utility == doctest::Approx(0.9).epsilon(1e-7));
    CHECK(front.points[0].unfairness == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(front.points[1].utility == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(front.points[1].unfairness ==
          doctest::Approx(0.125 * std::sqrt(2.0)).epsilon(1e-6));
    CHECK(front.points[2].utility == doctest::Approx(1.1).epsilon(1e-7));
    CHECK(front.points[2].unfairness ==
          doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-6));
  }
  SUBCASE("two points give the endpoints") {
    const ParetoFront front = qpSweepFront(toy2(), 2);
    REQUIRE(front.points.size() == 2);
    CHECK(front.first().utility == doctest::Approx(0.9).epsilon(1e-7));
    CHECK(front.last().utility == doctest::Approx(1.1).epsilon(1e-7));
  }
  SUBCASE("agrees with the facet walk on toy3") {
    const ParetoFront sweep = qpSweepFront(toy3(), 11);
    const ParetoFront exact = pexpoFront(toy3());
    for (const auto& p : sweep.points)
      CHECK(std::abs(exact.utilityAt(p.unfairness) - p.utility) <= 1e-6);
  }
  SUBCASE("grid must have at least two points") {
    CHECK_THROWS_AS(qpSweepFront(toy2(), 1), InvalidArgument);
  }
}

TEST_CASE("frontGap") {
  SUBCASE("identical fronts have zero gap") {
    const ParetoFront f = pexpoFront(toy3());
    const FrontGap gap = frontGap(f, f);
    CHECK(gap.hypervolumeGap == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(gap.maxUtilityGap == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("a straight segment equals its endpoint hull") {
    const ParetoFront exact = pexpoFront(toy2());
    ParetoFront endpoints;
    endpoints.points = {exact.first(), exact.last()};
    CHECK(frontGap(endpoints, exact).hypervolumeGap <= 1e-12);
  }
  SUBCASE("empty fronts are rejected") {
    const ParetoFront f = pexpoFront(toy2());
    CHECK_THROWS_AS(frontGap(ParetoFront{}, f), EmptyFront);
  }
}

TEST_CASE("fronts match the vertex-weight oracle on small instances") {
  for (int rep = 0; rep < 4; ++rep) {
    const QueryInstance inst = genSyntheticWithSize(4, 500 + rep);
    const ParetoFront exact = pexpoFront(inst);
    const ParetoFront oracle = testsupport::oracleFront(inst, 15);
    for (const auto& p : oracle.points)
      CHECK(exact.utilityAt(p.unfairness) >= p.utility - 1e-6);
    for (const auto& p : exact.points) {
      const auto o = testsupport::oracleAtUtility(inst, p.utility);
      CHECK(std::abs(o.unfairness - p.unfairness) <= 1e-6);
    }
  }
}
