#include <doctest.h>

#include <cmath>
#include <random>

#include "expofront/convex.hpp"
#include "expofront/harness.hpp"
#include "support/simplex_oracle.hpp"
#include "support/toys.hpp"

using namespace expofront;
using testsupport::toy2;
using testsupport::toy3;

TEST_CASE("startPoint") {
  SUBCASE("toy2: center is fair and utility is forced") {
    const auto x = startPoint(toy2());
    CHECK(x[0] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(x[1] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(utilityOf(x, toy2().relevance) == doctest::Approx(0.9).epsilon(1e-9));
  }
  SUBCASE("toy3: utility-maximal point among the fair ones") {
    const QueryInstance inst = toy3();
    const auto x = startPoint(inst);
    const Expohedron poly(inst.exposureWeights);
    const double x3 = inst.targetExposure[1];
    CHECK(x[0] == doctest::Approx(poly.prefixBound(2) - x3).epsilon(1e-7));
    CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(x[2] == doctest::Approx(x3).epsilon(1e-7));
    CHECK(unfairnessOf(x, inst) <= 1e-7);
  }
  SUBCASE("toy2 with an unattainable merit target lands on the vertex") {
    const auto x = startPoint(toy2(TargetPolicy::Merit));
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("minUnfairnessAtUtility") {
  MajorizationSolver solver(toy2());
  SUBCASE("interior utility level") {
    const auto x = solver.minUnfairnessAtUtility(1.0);
    CHECK(x[0] == doctest::Approx(0.875).epsilon(1e-7));
    CHECK(x[1] == doctest::Approx(0.625).epsilon(1e-7));
    CHECK(unfairnessOf(x, toy2()) ==
          doctest::Approx(0.125 * std::sqrt(2.0)).epsilon(1e-6));
  }
  SUBCASE("max utility is the PRP point") {
    const auto x = solver.minUnfairnessAtUtility(1.1);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-7));
  }
  SUBCASE("utilities beyond PRP are infeasible") {
    CHECK_THROWS_AS(solver.minUnfairnessAtUtility(1.2), UtilityInfeasible);
  }
  SUBCASE("unfairness is monotone in the utility level") {
    MajorizationSolver s3(toy3());
    double prev = -1.0;
    const double u0 = utilityOf(s3.startPoint(), toy3().relevance);
    for (int i = 0; i <= 12; ++i) {
      const double u = u0 + (s3.prpUtility() - u0) * i / 12.0;
      const double f = unfairnessOf(s3.minUnfairnessAtUtility(u), toy3());
      CHECK(f >= prev - 1e-9);
      prev = f;
    }
  }
}

TEST_CASE("solver outputs stay inside the polytope") {
  const auto instances = genSynthetic(SyntheticKind::Small, 8, 21);
  for (const auto& inst : instances) {
    MajorizationSolver solver(inst);
    const Expohedron& poly = solver.polytope();
    CHECK(poly.check(solver.startPoint(), 1e-7).inside());
    const double u0 = utilityOf(solver.startPoint(), inst.relevance);
    for (int i = 1; i <= 3; ++i) {
      const double u = u0 + (solver.prpUtility() - u0) * i / 3.0;
      CHECK(poly.check(solver.minUnfairnessAtUtility(u), 1e-7).inside());
    }
  }
}

TEST_CASE("agreement with the vertex-weight oracle") {
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3 + static_cast<int>(uniformIndex(rng, 3));
    QueryInstance inst = genSyntheticWithSize(n, 1000 + rep);
    MajorizationSolver solver(inst);
    const double fMin = solver.minUnfairness();
    CHECK(std::abs(fMin - testsupport::oracleMinUnfairness(inst)) <= 1e-6);
    const double u0 = utilityOf(solver.startPoint(), inst.relevance);
    for (int i = 0; i <= 4; ++i) {
      const double u = u0 + (solver.prpUtility() - u0) * i / 4.0;
      const double mine = unfairnessOf(solver.minUnfairnessAtUtility(u), inst);
      const double oracle = testsupport::oracleAtUtility(inst, u).unfairness;
      CHECK(std::abs(mine - oracle) <= 1e-6);
      ++checked;
    }
  }
  CHECK(checked == 50);
}

TEST_CASE("scalarized Birkhoff baseline") {
  SUBCASE("alpha = 1 recovers the PRP permutation") {
    for (const QueryInstance& inst : {toy2(), toy3()}) {
      const ScalarizedResult res = scalarizedBirkhoffQP(inst, 1.0, 4000);
      const Expohedron poly(inst.exposureWeights);
      const auto x = res.matrix.applyExposure(inst.exposureWeights);
      const auto prp = poly.maxUtilityVertex(inst.relevance);
      CHECK(utilityOf(x, inst.relevance) >=
            utilityOf(prp, inst.relevance) - 1e-3);
      // Row argmax must be the PRP assignment.
      const Permutation ranking = poly.prpRanking(inst.relevance);
      for (int rank = 0; rank < inst.itemCount(); ++rank) {
        int best = 0;
        for (int j = 1; j < inst.itemCount(); ++j)
          if (res.matrix.at(ranking.itemAt(rank), j) >
              res.matrix.at(ranking.itemAt(rank), best))
            best = j;
        CHECK(best == rank);
      }
    }
  }
  SUBCASE("alpha = 0 reaches a feasible target") {
    const ScalarizedResult res = scalarizedBirkhoffQP(toy2(), 0.0, 4000);
    const auto x = res.matrix.applyExposure(toy2().exposureWeights);
    CHECK(unfairnessOf(x, toy2()) <= 1e-6);
  }
  SUBCASE("toy2 alpha = 0.5 balances on the segment") {
    const ScalarizedResult res = scalarizedBirkhoffQP(toy2(), 0.5, 20000);
    const auto x = res.matrix.applyExposure(toy2().exposureWeights);
    CHECK(x[0] == doctest::Approx(0.95).epsilon(2e-4));
    CHECK(x[1] == doctest::Approx(0.55).epsilon(2e-4));
    CHECK(utilityOf(x, toy2().relevance) == doctest::Approx(1.06).epsilon(1e-3));
    CHECK(unfairnessOf(x, toy2()) ==
          doctest::Approx(0.2 * std::sqrt(2.0)).epsilon(1e-3));
  }
  SUBCASE("outputs are bistochastic and feasible") {
    const auto instances = genSynthetic(SyntheticKind::Small, 4, 77);
    for (const auto& inst : instances) {
      const ScalarizedResult res = scalarizedBirkhoffQP(inst, 0.5, 600);
      CHECK(res.matrix.stochasticError() <= 1e-6);
      const Expohedron poly(inst.exposureWeights);
      const auto x = res.matrix.applyExposure(inst.exposureWeights);
      CHECK(poly.check(x, 1e-6 * poly.scale()).inside());
    }
  }
  SUBCASE("alpha outside [0,1] is rejected") {
    CHECK_THROWS_AS(scalarizedBirkhoffQP(toy2(), 1.5), InvalidArgument);
  }
}
