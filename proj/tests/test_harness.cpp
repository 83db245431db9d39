#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "expofront/harness.hpp"
#include "support/toys.hpp"

using namespace expofront;
using testsupport::toy2;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "expofront_test_tmp_" + std::to_string(counter++) + ".txt";
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("labeled sparse format parsing") {
  SUBCASE("grades, bins and weights") {
    TempFile f(
        "2 qid:10 1:0.3 132:7.2\n"
        "0 qid:10 1:0.1 132:4.0\n"
        "4 qid:11 132:12.5\n");
    const auto instances =
        parseLetorFile(f.path, {132, {5.0, 10.0}, 4.0});
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].queryId == "10");
    CHECK(instances[0].relevance[0] == doctest::Approx(0.5));
    CHECK(instances[0].groupOf[0] == 1);  // 5 <= 7.2 < 10 -> second bin
    CHECK(instances[0].groupOf[1] == 0);  // 4.0 < 5 -> first bin
    CHECK(instances[1].groupOf[0] == 2);  // 12.5 >= 10 -> third bin
    CHECK(instances[0].exposureWeights[0] == doctest::Approx(1.0));
    CHECK(instances[0].exposureWeights[1] ==
          doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-12));
  }
  SUBCASE("malformed grade") {
    TempFile f("x qid:1 132:1.0\n");
    CHECK_THROWS_AS(parseLetorFile(f.path, {132, {}, 4.0}), ParseError);
  }
  SUBCASE("missing group feature") {
    TempFile f("1 qid:1 3:0.5\n");
    CHECK_THROWS_AS(parseLetorFile(f.path, {132, {}, 4.0}), MissingFeature);
  }
  SUBCASE("empty file") {
    TempFile f("");
    CHECK(parseLetorFile(f.path, {132, {}, 4.0}).empty());
  }
  SUBCASE("comments are ignored") {
    TempFile f("1 qid:5 132:2.0 # docid = 42\n");
    const auto instances = parseLetorFile(f.path, {132, {}, 4.0});
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].relevance[0] == doctest::Approx(0.25));
  }
}

TEST_CASE("filterInstances") {
  auto raw = [](int n, std::vector<double> rel, std::vector<int> groups) {
    QueryInstance inst;
    inst.queryId = "q" + std::to_string(n);
    inst.relevance = std::move(rel);
    inst.groupOf = std::move(groups);
    inst.exposureWeights = dcgExposure(inst.itemCount());
    return inst;
  };

  std::vector<QueryInstance> input;
  input.push_back(raw(0, std::vector<double>(150, 0.5), std::vector<int>(150, 0)));
  input.push_back(raw(1, {0.5}, {0}));
  input.push_back(raw(2, {0.3, 0.3, 0.3}, {0, 0, 1}));
  input.push_back(raw(3, {0.1, 0.9, 0.5}, {2, 2, 2}));
  input.push_back(raw(4, {0.1, 0.9, 0.5}, {0, 1, 2}));
  input.push_back(raw(5, {0.9, 0.6, 0.1}, {0, 0, 1}));  // toy3 shape, retained

  const FilterResult result = filterInstances(input, 100);
  CHECK(result.drops.maxDocs == 1);
  CHECK(result.drops.singleDocument == 1);
  CHECK(result.drops.allEqualRelevance == 1);
  CHECK(result.drops.singleGroup == 1);
  CHECK(result.drops.allDistinctGroups == 1);
  CHECK(result.drops.retained == 1);
  REQUIRE(result.instances.size() == 1);
  CHECK(result.instances[0].queryId == "q5");

  SUBCASE("group ids are compacted") {
    std::vector<QueryInstance> sparse;
    sparse.push_back(raw(9, {0.1, 0.9, 0.5}, {4, 4, 7}));
    const FilterResult r = filterInstances(sparse, 100);
    REQUIRE(r.instances.size() == 1);
    CHECK(r.instances[0].groupOf == std::vector<int>{0, 0, 1});
  }
  SUBCASE("filtering is idempotent") {
    auto again = filterInstances(result.instances, 100);
    CHECK(again.instances.size() == result.instances.size());
    CHECK(again.drops.retained == 1);
    CHECK(again.instances[0].groupOf == result.instances[0].groupOf);
  }
}

TEST_CASE("synthetic generation") {
  SUBCASE("small kind ranges") {
    const auto instances = genSynthetic(SyntheticKind::Small, 30, 3);
    for (const auto& inst : instances) {
      CHECK(inst.itemCount() >= 8);
      CHECK(inst.itemCount() <= 20);
      CHECK(inst.groupCount() >= 2);
      CHECK(inst.groupCount() <= inst.itemCount() - 1);
      CHECK_NOTHROW(validateInstance(inst));
    }
    auto filtered = filterInstances(instances, 100);
    CHECK(filtered.instances.size() == instances.size());
  }
  SUBCASE("large kind ranges") {
    const auto instances = genSynthetic(SyntheticKind::Large, 30, 4);
    for (const auto& inst : instances) {
      CHECK(inst.itemCount() >= 5);
      CHECK(inst.itemCount() <= 100);
    }
  }
  SUBCASE("seeded determinism") {
    const auto a = genSynthetic(SyntheticKind::Small, 10, 99);
    const auto b = genSynthetic(SyntheticKind::Small, 10, 99);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].relevance == b[i].relevance);
      CHECK(a[i].groupOf == b[i].groupOf);
      CHECK(a[i].targetExposure == b[i].targetExposure);
    }
  }
}

TEST_CASE("instance JSON round-trip") {
  const auto instances = genSynthetic(SyntheticKind::Small, 5, 8);
  const std::string text = instancesToJson(instances);
  const auto back = instancesFromJson(text);
  REQUIRE(back.size() == instances.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].queryId == instances[i].queryId);
    CHECK(back[i].relevance == instances[i].relevance);
    CHECK(back[i].groupOf == instances[i].groupOf);
    CHECK(back[i].exposureWeights == instances[i].exposureWeights);
    CHECK(back[i].targetExposure == instances[i].targetExposure);
  }
  SUBCASE("gamma defaults to DCG weights") {
    const auto parsed = instancesFromJson(
        R"([{"queryId":"q","relevance":[0.9,0.1],"groups":[1,2],
             "target":{"policy":"size-proportional"}}])");
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].exposureWeights[0] == doctest::Approx(1.0));
    CHECK(parsed[0].targetExposure[0] == doctest::Approx(0.75));
  }
}

TEST_CASE("distribution JSON round-trip") {
  RankingDistribution dist;
  dist.atoms.push_back({0.25, Permutation({1, 0, 2})});
  dist.atoms.push_back({0.75, Permutation({2, 1, 0})});
  const auto back = distributionFromJson(distributionToJson(dist));
  REQUIRE(back.atoms.size() == 2);
  CHECK(back.atoms[0].weight == doctest::Approx(0.25));
  CHECK(back.atoms[1].perm == dist.atoms[1].perm);
}

TEST_CASE("front records CSV round-trip") {
  std::vector<FrontRecord> rows(2);
  rows[0] = {"q1", "pexpo", 0.0, 1.25, 0.125, 0.9, 0.5, {1.0, 0.5}};
  rows[1] = {"q2", "sphere-expo", 3.0, 1.0, 0.0, 1.0,
             std::numeric_limits<double>::quiet_NaN(), {0.75, 0.75}};
  const auto back = frontRecordsFromCsv(frontRecordsToCsv(rows));
  REQUIRE(back.size() == 2);
  CHECK(back[0].queryId == "q1");
  CHECK(back[0].utility == 1.25);
  CHECK(back[0].exposure == std::vector<double>{1.0, 0.5});
  CHECK(std::isnan(back[1].normalizedUnfairness));
}

TEST_CASE("runExperiment") {
  ExperimentConfig cfg;
  cfg.dataset = genSynthetic(SyntheticKind::Small, 5, 7);
  cfg.deliveries = 50;
  cfg.method.kind = MethodSpec::Kind::QpSweep;
  cfg.method.gridPoints = 20;

  SUBCASE("qp-sweep emits at most gridPoints rows per query") {
    const ExperimentResult res = runExperiment(cfg);
    CHECK(res.failures == 0);
    std::map<std::string, int> perQuery;
    for (const auto& r : res.rows) ++perQuery[r.queryId];
    CHECK(perQuery.size() == 5);
    for (const auto& [qid, count] : perQuery) CHECK(count <= 20);
  }
  SUBCASE("sphere-expo performs 2^K - 1 marked QP solves") {
    cfg.method.kind = MethodSpec::Kind::SphereExpo;
    cfg.method.rounds = 3;
    cfg.method.samplesPerArc = 5;
    const ExperimentResult res = runExperiment(cfg);
    CHECK(res.failures == 0);
    for (const auto& rep : res.reports) CHECK(rep.utilityQpSolves == 7);
  }
  SUBCASE("empty dataset") {
    cfg.dataset.clear();
    CHECK_THROWS_AS(runExperiment(cfg), EmptyDataset);
  }
  SUBCASE("reproducible bytes") {
    const std::string a = runExperiment(cfg).frontsCsv();
    const std::string b = runExperiment(cfg).frontsCsv();
    CHECK(a == b);
  }
}

TEST_CASE("aggregateFronts") {
  SUBCASE("single front aggregates to itself") {
    std::vector<FrontRecord> rows;
    FrontRecord r;
    r.queryId = "q";
    r.method = "pexpo";
    r.normalizedUnfairness = 0.0;
    r.normalizedUtility = 0.8;
    rows.push_back(r);
    r.normalizedUnfairness = 1.0;
    r.normalizedUtility = 1.0;
    rows.push_back(r);
    const AggregatedCurve curve = aggregateFronts(rows, 5);
    REQUIRE(curve.grid.size() == 5);
    CHECK(curve.meanUtility[0] == doctest::Approx(0.8));
    CHECK(curve.meanUtility[2] == doctest::Approx(0.9));
    CHECK(curve.meanUtility[4] == doctest::Approx(1.0));
    CHECK(curve.queryCount[0] == 1);
  }
  SUBCASE("toy2 normalized front is a straight line") {
    ExperimentConfig cfg;
    cfg.dataset = {toy2()};
    cfg.deliveries = 10;
    cfg.method.kind = MethodSpec::Kind::Pexpo;
    const ExperimentResult res = runExperiment(cfg);
    const AggregatedCurve curve = aggregateFronts(res.rows, 3);
    CHECK(curve.meanUtility[0] == doctest::Approx(0.9 / 1.1).epsilon(1e-6));
    CHECK(curve.meanUtility[1] == doctest::Approx(1.0 / 1.1).epsilon(1e-6));
    CHECK(curve.meanUtility[2] == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("grid validation") {
    CHECK_THROWS_AS(aggregateFronts({}, 1), InvalidGrid);
  }
}
