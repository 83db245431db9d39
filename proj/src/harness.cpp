#include "expofront/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "expofront/controller.hpp"
#include "expofront/convex.hpp"

namespace expofront {

using nlohmann::json;

namespace {

std::string fmtDouble(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

double elapsedSeconds(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - from)
      .count();
}

void parallelFor(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

// ---------- instance / distribution serialization ----------

std::string instancesToJson(const std::vector<QueryInstance>& instances) {
  json arr = json::array();
  for (const auto& inst : instances) {
    json obj;
    obj["queryId"] = inst.queryId;
    obj["relevance"] = inst.relevance;
    json groups = json::array();
    for (int gid : inst.groupOf) groups.push_back(gid + 1);
    obj["groups"] = groups;
    obj["gamma"] = inst.exposureWeights;
    if (!inst.targetExposure.empty())
      obj["target"] = json{{"values", inst.targetExposure}};
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::vector<QueryInstance> instancesFromJson(const std::string& text,
                                             bool validate) {
  json root = json::parse(text);
  if (root.is_object()) {
    json arr = json::array();
    arr.push_back(root);
    root = std::move(arr);
  }
  if (!root.is_array()) throw ParseError("instance JSON must be an array");

  std::vector<QueryInstance> out;
  for (const auto& obj : root) {
    QueryInstance inst;
    if (obj.contains("queryId")) {
      const auto& q = obj.at("queryId");
      inst.queryId = q.is_string() ? q.get<std::string>() : q.dump();
    }
    inst.relevance = obj.at("relevance").get<std::vector<double>>();
    for (int gid : obj.at("groups").get<std::vector<int>>())
      inst.groupOf.push_back(gid - 1);
    if (obj.contains("gamma"))
      inst.exposureWeights = obj.at("gamma").get<std::vector<double>>();
    else
      inst.exposureWeights = dcgExposure(inst.itemCount());

    if (obj.contains("target")) {
      const auto& t = obj.at("target");
      TargetSpec spec;
      if (t.contains("values")) {
        spec.policy = TargetPolicy::Explicit;
        spec.values = t.at("values").get<std::vector<double>>();
      } else {
        const std::string policy = t.at("policy").get<std::string>();
        if (policy == "merit")
          spec.policy = TargetPolicy::Merit;
        else if (policy == "size-proportional")
          spec.policy = TargetPolicy::SizeProportional;
        else
          throw ParseError("unknown target policy '" + policy + "'");
      }
      inst.targetExposure = buildTargetExposure(inst, spec);
    }
    if (validate) validateInstance(inst);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<QueryInstance> loadInstances(const std::string& path,
                                         bool validate) {
  return instancesFromJson(readFile(path), validate);
}

void saveInstances(const std::string& path,
                   const std::vector<QueryInstance>& instances) {
  writeFile(path, instancesToJson(instances));
}

std::string distributionToJson(const RankingDistribution& dist) {
  json atoms = json::array();
  for (const auto& a : dist.atoms)
    atoms.push_back(json{{"weight", a.weight}, {"ranking", a.perm.itemsByRank()}});
  return json{{"atoms", atoms}}.dump(2) + "\n";
}

RankingDistribution distributionFromJson(const std::string& text) {
  const json root = json::parse(text);
  RankingDistribution dist;
  for (const auto& a : root.at("atoms"))
    dist.atoms.push_back({a.at("weight").get<double>(),
                          Permutation(a.at("ranking").get<std::vector<int>>())});
  return dist;
}

// ---------- dataset ingestion ----------

std::vector<QueryInstance> parseLetorFile(const std::string& path,
                                          const LetorOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);

  struct RawQuery {
    std::vector<double> relevance;
    std::vector<int> group;
  };
  std::vector<std::string> order;
  std::map<std::string, RawQuery> queries;

  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;  // blank line

    char* end = nullptr;
    const double grade = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0')
      throw ParseError("line " + std::to_string(lineNo) +
                       ": relevance grade is not a number");

    std::string qidTok;
    if (!(ss >> qidTok) || qidTok.rfind("qid:", 0) != 0)
      throw ParseError("line " + std::to_string(lineNo) + ": missing qid");
    const std::string qid = qidTok.substr(4);
    if (qid.empty())
      throw ParseError("line " + std::to_string(lineNo) + ": empty qid");

    bool haveGroupFeature = false;
    double groupValue = 0.0;
    while (ss >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        throw ParseError("line " + std::to_string(lineNo) +
                         ": malformed feature '" + token + "'");
      char* fend = nullptr;
      const long fid = std::strtol(token.c_str(), &fend, 10);
      if (fend != token.c_str() + colon)
        throw ParseError("line " + std::to_string(lineNo) +
                         ": malformed feature id '" + token + "'");
      char* vend = nullptr;
      const double value = std::strtod(token.c_str() + colon + 1, &vend);
      if (vend == token.c_str() + colon + 1 || *vend != '\0')
        throw ParseError("line " + std::to_string(lineNo) +
                         ": malformed feature value '" + token + "'");
      if (fid == opts.groupFeature) {
        haveGroupFeature = true;
        groupValue = value;
      }
    }
    if (!haveGroupFeature)
      throw MissingFeature("line " + std::to_string(lineNo) + ": feature " +
                           std::to_string(opts.groupFeature) + " not present");

    int bin = 0;
    for (double edge : opts.binEdges)
      if (edge <= groupValue) ++bin;

    auto [it, inserted] = queries.try_emplace(qid);
    if (inserted) order.push_back(qid);
    it->second.relevance.push_back(
        std::clamp(grade / opts.maxRelevanceGrade, 0.0, 1.0));
    it->second.group.push_back(bin);
  }

  std::vector<QueryInstance> out;
  out.reserve(order.size());
  for (const auto& qid : order) {
    const RawQuery& raw = queries.at(qid);
    QueryInstance inst;
    inst.queryId = qid;
    inst.relevance = raw.relevance;
    inst.groupOf = raw.group;
    inst.exposureWeights = dcgExposure(inst.itemCount());
    out.push_back(std::move(inst));
  }
  return out;
}

std::string DropCounts::json() const {
  return nlohmann::json{{"maxDocs", maxDocs},
                        {"singleDocument", singleDocument},
                        {"allEqualRelevance", allEqualRelevance},
                        {"singleGroup", singleGroup},
                        {"allDistinctGroups", allDistinctGroups},
                        {"retained", retained}}
      .dump(2);
}

FilterResult filterInstances(std::vector<QueryInstance> instances,
                             int maxDocs) {
  FilterResult result;
  for (auto& inst : instances) {
    const int n = inst.itemCount();
    if (n > maxDocs) {
      ++result.drops.maxDocs;
      continue;
    }
    if (n <= 1) {
      ++result.drops.singleDocument;
      continue;
    }
    const auto [mn, mx] =
        std::minmax_element(inst.relevance.begin(), inst.relevance.end());
    if (*mx - *mn <= 1e-12) {
      ++result.drops.allEqualRelevance;
      continue;
    }
    std::vector<int> distinct(inst.groupOf);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    const int g = static_cast<int>(distinct.size());
    if (g <= 1) {
      ++result.drops.singleGroup;
      continue;
    }
    if (g >= n) {
      ++result.drops.allDistinctGroups;
      continue;
    }
    // Compact group ids to 0..g-1 (ascending original id).
    for (int& gid : inst.groupOf)
      gid = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(),
                                              gid) -
                             distinct.begin());
    ++result.drops.retained;
    result.instances.push_back(std::move(inst));
  }
  return result;
}

// ---------- synthetic data ----------

namespace {

QueryInstance synthesizeOne(int n, std::mt19937_64& rng,
                            const std::string& queryId) {
  QueryInstance inst;
  inst.queryId = queryId;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    inst.relevance.resize(n);
    for (int i = 0; i < n; ++i) inst.relevance[i] = uniformReal(rng);
    const int g = 2 + static_cast<int>(uniformIndex(rng, n - 2));
    inst.groupOf.resize(n);
    std::vector<int> members(g, 0);
    for (int i = 0; i < n; ++i) {
      inst.groupOf[i] = static_cast<int>(uniformIndex(rng, g));
      ++members[inst.groupOf[i]];
    }
    if (std::any_of(members.begin(), members.end(),
                    [](int m) { return m == 0; }))
      continue;  // resample until every group is populated
    const auto [mn, mx] =
        std::minmax_element(inst.relevance.begin(), inst.relevance.end());
    if (*mx - *mn <= 1e-12) continue;
    const double total =
        std::accumulate(inst.relevance.begin(), inst.relevance.end(), 0.0);
    if (total <= 0.0) continue;
    inst.exposureWeights = dcgExposure(n);
    inst.targetExposure =
        buildTargetExposure(inst, {TargetPolicy::Merit, {}});
    validateInstance(inst);
    return inst;
  }
  throw Error("synthetic generation failed to produce a valid instance");
}

}  // namespace

std::vector<QueryInstance> genSynthetic(SyntheticKind kind, int count,
                                        std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<QueryInstance> out;
  out.reserve(count);
  const char* prefix = kind == SyntheticKind::Small ? "ds" : "dl";
  for (int c = 0; c < count; ++c) {
    const int n = kind == SyntheticKind::Small
                      ? 8 + static_cast<int>(uniformIndex(rng, 13))
                      : 5 + static_cast<int>(uniformIndex(rng, 96));
    out.push_back(
        synthesizeOne(n, rng, std::string(prefix) + "-" + std::to_string(c)));
  }
  return out;
}

QueryInstance genSyntheticWithSize(int n, std::uint64_t seed) {
  if (n < 3) throw InvalidArgument("need n >= 3");
  std::mt19937_64 rng(seed);
  return synthesizeOne(n, rng, "fixed-" + std::to_string(n));
}

// ---------- fronts CSV ----------

std::string frontRecordsToCsv(const std::vector<FrontRecord>& rows) {
  std::ostringstream os;
  os << "queryId,method,param,utility,unfairness,normalizedUtility,"
        "normalizedUnfairness,exposure\n";
  for (const auto& r : rows) {
    os << r.queryId << ',' << r.method << ',' << fmtDouble(r.param) << ','
       << fmtDouble(r.utility) << ',' << fmtDouble(r.unfairness) << ','
       << fmtDouble(r.normalizedUtility) << ','
       << fmtDouble(r.normalizedUnfairness) << ",\"";
    os << json(r.exposure).dump();
    os << "\"\n";
  }
  return os.str();
}

namespace {

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::vector<FrontRecord> frontRecordsFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<FrontRecord> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = splitCsvLine(line);
    if (f.size() != 8) throw ParseError("front CSV row has wrong arity");
    FrontRecord r;
    r.queryId = f[0];
    r.method = f[1];
    r.param = std::strtod(f[2].c_str(), nullptr);
    r.utility = std::strtod(f[3].c_str(), nullptr);
    r.unfairness = std::strtod(f[4].c_str(), nullptr);
    r.normalizedUtility = std::strtod(f[5].c_str(), nullptr);
    r.normalizedUnfairness = std::strtod(f[6].c_str(), nullptr);
    r.exposure = json::parse(f[7]).get<std::vector<double>>();
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------- experiments ----------

const char* MethodSpec::name(Kind k) {
  switch (k) {
    case Kind::Pexpo: return "pexpo";
    case Kind::SphereExpo: return "sphere-expo";
    case Kind::BirkhoffQP: return "birkhoff-qp";
    case Kind::Ctrl: return "ctrl";
    case Kind::QpSweep: return "qp-sweep";
  }
  return "?";
}

namespace {

std::vector<double> pullInside(std::vector<double> x, const Expohedron& poly) {
  auto inside = [&](const std::vector<double>& y) {
    try {
      return poly.check(y).inside();
    } catch (const NotOnSumHyperplane&) {
      return false;
    }
  };
  // Normalize the total, then shrink toward the barycenter if needed.
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  const double shift = (poly.totalExposure() - total) / poly.dim();
  for (double& v : x) v += shift;
  if (inside(x)) return x;
  const double c = poly.totalExposure() / poly.dim();
  for (double beta = 1e-12; beta <= 0.1; beta *= 4.0) {
    std::vector<double> y(x);
    for (size_t i = 0; i < y.size(); ++i) y[i] = (1.0 - beta) * y[i] + beta * c;
    if (inside(y)) return y;
  }
  throw NotInPolytope("exposure point too far outside to repair");
}

struct QueryOutput {
  std::vector<FrontRecord> rows;
  QueryReport report;
};

QueryOutput runQuery(const ExperimentConfig& cfg, const QueryInstance& inst) {
  const MethodSpec& spec = cfg.method;
  QueryOutput out;
  out.report.queryId = inst.queryId;

  const Expohedron poly(inst.exposureWeights);
  const std::vector<double> prp = poly.maxUtilityVertex(inst.relevance);
  const double uPrp = utilityOf(prp, inst.relevance);
  const double fPrp = unfairnessOf(prp, inst);

  auto makeRow = [&](double param, double utility, double unfairness,
                     const std::vector<double>& exposure) {
    FrontRecord r;
    r.queryId = inst.queryId;
    r.method = MethodSpec::name(spec.kind);
    r.param = param;
    r.utility = utility;
    r.unfairness = unfairness;
    r.normalizedUtility = uPrp > 0.0 ? utility / uPrp : 0.0;
    r.normalizedUnfairness = fPrp > 1e-12
                                 ? unfairness / fPrp
                                 : std::numeric_limits<double>::quiet_NaN();
    r.exposure = exposure;
    return r;
  };

  ParetoFront front;
  std::vector<RankingDistribution> dists;
  auto t0 = std::chrono::steady_clock::now();

  switch (spec.kind) {
    case MethodSpec::Kind::Pexpo: {
      front = pexpoFront(inst);
      out.report.seconds.front = elapsedSeconds(t0);
      for (size_t i = 0; i < front.points.size(); ++i)
        out.rows.push_back(makeRow(static_cast<double>(i),
                                   front.points[i].utility,
                                   front.points[i].unfairness,
                                   front.points[i].exposure));
      break;
    }
    case MethodSpec::Kind::SphereExpo: {
      SphereExpoResult prof =
          sphereExpoProfile(inst, spec.rounds, spec.samplesPerArc);
      out.report.seconds.front = elapsedSeconds(t0);
      out.report.utilityQpSolves = prof.utilityQpSolves;
      front = std::move(prof.front);
      for (const auto& p : front.points)
        out.rows.push_back(makeRow(static_cast<double>(spec.rounds), p.utility,
                                   p.unfairness, p.exposure));
      break;
    }
    case MethodSpec::Kind::QpSweep: {
      front = qpSweepFront(inst, spec.gridPoints);
      out.report.seconds.front = elapsedSeconds(t0);
      for (size_t i = 0; i < front.points.size(); ++i)
        out.rows.push_back(makeRow(static_cast<double>(i),
                                   front.points[i].utility,
                                   front.points[i].unfairness,
                                   front.points[i].exposure));
      break;
    }
    case MethodSpec::Kind::BirkhoffQP: {
      std::vector<double> grid = spec.alphaGrid;
      if (grid.empty()) throw InvalidArgument("empty alpha grid");
      std::vector<BistochasticMatrix> mats;
      for (double alpha : grid) {
        ScalarizedResult r = scalarizedBirkhoffQP(inst, alpha, spec.qpBudget);
        const std::vector<double> x =
            r.matrix.applyExposure(inst.exposureWeights);
        out.rows.push_back(makeRow(alpha, utilityOf(x, inst.relevance),
                                   unfairnessOf(x, inst), x));
        mats.push_back(std::move(r.matrix));
      }
      out.report.seconds.front = elapsedSeconds(t0);
      t0 = std::chrono::steady_clock::now();
      for (const auto& B : mats) dists.push_back(bvnDecompose(B, 1e-6));
      out.report.seconds.decomposition = elapsedSeconds(t0);
      break;
    }
    case MethodSpec::Kind::Ctrl: {
      std::vector<double> grid = spec.lambdaGrid;
      if (grid.empty()) throw InvalidArgument("empty lambda grid");
      for (double lambda : grid) {
        const CtrlResult r = ctrlSimulate(inst, lambda, cfg.deliveries, true);
        // Mean per-item exposure over the delivered rankings.
        std::vector<double> meanExposure(inst.itemCount(), 0.0);
        for (const auto& perm : r.deliveries) {
          const std::vector<double> e = perm.exposure(inst.exposureWeights);
          for (int i = 0; i < inst.itemCount(); ++i) meanExposure[i] += e[i];
        }
        for (double& v : meanExposure) v /= r.deliveriesDone;
        out.rows.push_back(makeRow(lambda, r.finalNdcg * uPrp,
                                   r.finalUnfairness, meanExposure));
      }
      out.report.seconds.front = elapsedSeconds(t0);
      break;
    }
  }

  // Decomposition and delivery phases for the exposure-space methods.
  if (spec.kind == MethodSpec::Kind::Pexpo ||
      spec.kind == MethodSpec::Kind::SphereExpo ||
      spec.kind == MethodSpec::Kind::QpSweep) {
    t0 = std::chrono::steady_clock::now();
    for (const auto& p : front.points)
      dists.push_back(
          caratheodoryDecompose(pullInside(p.exposure, poly), poly));
    out.report.seconds.decomposition = elapsedSeconds(t0);
  }
  if (!dists.empty() && cfg.deliveries > 0) {
    t0 = std::chrono::steady_clock::now();
    const RankingDistribution& mid = dists[dists.size() / 2];
    sampleDeliveries(mid, cfg.deliveries, DeliveryStrategy::LowDiscrepancy);
    out.report.seconds.delivery = elapsedSeconds(t0);
  }
  return out;
}

}  // namespace

std::string ExperimentResult::runtimeJson() const {
  const int n = static_cast<int>(reports.size());
  PhaseTimes mean;
  double solves = 0.0;
  int ok = 0;
  for (const auto& r : reports) {
    if (r.failed) continue;
    ++ok;
    mean.front += r.seconds.front;
    mean.decomposition += r.seconds.decomposition;
    mean.delivery += r.seconds.delivery;
    solves += r.utilityQpSolves;
  }
  const double denom = ok > 0 ? ok : 1;
  json j{{"method", methodName},
         {"queryCount", n},
         {"failures", failures},
         {"meanSecondsPerQuery", mean.total() / denom},
         {"phases",
          {{"front", mean.front / denom},
           {"decomposition", mean.decomposition / denom},
           {"delivery", mean.delivery / denom}}},
         {"meanUtilityQpSolves", solves / denom}};
  return j.dump(2) + "\n";
}

ExperimentResult runExperiment(const ExperimentConfig& config) {
  if (config.dataset.empty()) throw EmptyDataset("no queries in the dataset");
  for (const auto& inst : config.dataset) validateInstance(inst);

  const int count = static_cast<int>(config.dataset.size());
  std::vector<QueryOutput> outputs(count);
  parallelFor(count, config.threads, [&](int i) {
    try {
      outputs[i] = runQuery(config, config.dataset[i]);
    } catch (const std::exception& e) {
      outputs[i].report.queryId = config.dataset[i].queryId;
      outputs[i].report.failed = true;
      outputs[i].report.error = e.what();
    }
  });

  ExperimentResult result;
  result.methodName = MethodSpec::name(config.method.kind);
  for (auto& o : outputs) {
    if (o.report.failed) ++result.failures;
    result.reports.push_back(std::move(o.report));
    for (auto& row : o.rows) result.rows.push_back(std::move(row));
  }
  return result;
}

// ---------- aggregation ----------

AggregatedCurve aggregateFronts(const std::vector<FrontRecord>& rows,
                                int gridSize) {
  if (gridSize < 2) throw InvalidGrid("grid needs at least 2 levels");

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> perQuery;
  int skipped = 0;
  std::map<std::string, bool> skip;
  for (const auto& r : rows) {
    if (!perQuery.count(r.queryId)) order.push_back(r.queryId);
    if (std::isnan(r.normalizedUnfairness)) skip[r.queryId] = true;
    perQuery[r.queryId].emplace_back(r.normalizedUnfairness,
                                     r.normalizedUtility);
  }

  AggregatedCurve curve;
  curve.grid.resize(gridSize);
  curve.meanUtility.assign(gridSize, 0.0);
  curve.queryCount.assign(gridSize, 0);
  for (int i = 0; i < gridSize; ++i)
    curve.grid[i] = static_cast<double>(i) / (gridSize - 1);

  int used = 0;
  for (const auto& qid : order) {
    if (skip.count(qid)) {
      ++skipped;
      continue;
    }
    auto pts = perQuery[qid];
    std::sort(pts.begin(), pts.end());
    if (pts.empty()) continue;
    ++used;
    for (int i = 0; i < gridSize; ++i) {
      const double f = curve.grid[i];
      double u;
      if (f <= pts.front().first) {
        u = pts.front().second;
      } else if (f >= pts.back().first) {
        u = pts.back().second;
      } else {
        u = pts.back().second;
        for (size_t k = 1; k < pts.size(); ++k) {
          if (f <= pts[k].first) {
            const double f0 = pts[k - 1].first, f1 = pts[k].first;
            const double u0 = pts[k - 1].second, u1 = pts[k].second;
            u = f1 > f0 ? u0 + (f - f0) / (f1 - f0) * (u1 - u0) : u1;
            break;
          }
        }
      }
      curve.meanUtility[i] += u;
      curve.queryCount[i] += 1;
    }
  }
  if (used == 0) throw EmptyFront("no usable fronts to aggregate");
  for (int i = 0; i < gridSize; ++i) curve.meanUtility[i] /= used;
  curve.skippedQueries = skipped;
  return curve;
}

std::string aggregatedCurveToCsv(const AggregatedCurve& curve) {
  std::ostringstream os;
  os << "grid,meanUtility,count\n";
  for (size_t i = 0; i < curve.grid.size(); ++i)
    os << fmtDouble(curve.grid[i]) << ',' << fmtDouble(curve.meanUtility[i])
       << ',' << curve.queryCount[i] << '\n';
  return os.str();
}

// ---------- runtime benchmark ----------

std::string BenchReport::json() const {
  return nlohmann::json{{"queries", queries},
                        {"items", items},
                        {"qpBudget", qpBudget},
                        {"meanSecondsPerQuery",
                         {{"caratheodory", caratheodorySeconds},
                          {"bvn", bvnSeconds},
                          {"sphereExpoK3", sphereSeconds},
                          {"birkhoffQpGrid20", birkhoffQpSeconds}}}}
             .dump(2) +
         "\n";
}

std::string BenchReport::table() const {
  std::ostringstream os;
  os << "process         method            mean s/query\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-15s %-17s %12.4f\n", "decomposition",
                "caratheodory", caratheodorySeconds);
  os << buf;
  std::snprintf(buf, sizeof buf, "%-15s %-17s %12.4f\n", "decomposition",
                "bvn", bvnSeconds);
  os << buf;
  std::snprintf(buf, sizeof buf, "%-15s %-17s %12.4f\n", "pareto front",
                "sphere-expo(K=3)", sphereSeconds);
  os << buf;
  std::snprintf(buf, sizeof buf, "%-15s %-17s %12.4f\n", "pareto front",
                "birkhoff-qp(20)", birkhoffQpSeconds);
  os << buf;
  return os.str();
}

BenchReport runBench(int queries, int items, std::uint64_t seed) {
  if (queries < 1 || items < 3) throw InvalidArgument("bad bench shape");
  BenchReport report;
  report.queries = queries;
  report.items = items;
  report.qpBudget = 400;

  for (int q = 0; q < queries; ++q) {
    const QueryInstance inst = genSyntheticWithSize(items, seed + q);
    const Expohedron poly(inst.exposureWeights);

    // Same scalarized solution feeds both decompositions.
    const ScalarizedResult mid =
        scalarizedBirkhoffQP(inst, 0.5, report.qpBudget);
    const std::vector<double> x =
        pullInside(mid.matrix.applyExposure(inst.exposureWeights), poly);

    auto t0 = std::chrono::steady_clock::now();
    caratheodoryDecompose(x, poly);
    report.caratheodorySeconds += elapsedSeconds(t0);

    t0 = std::chrono::steady_clock::now();
    bvnDecompose(mid.matrix, 1e-6);
    report.bvnSeconds += elapsedSeconds(t0);

    t0 = std::chrono::steady_clock::now();
    sphereExpoProfile(inst, 3, 3);
    report.sphereSeconds += elapsedSeconds(t0);

    t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < 20; ++k)
      scalarizedBirkhoffQP(inst, static_cast<double>(k) / 19, report.qpBudget);
    report.birkhoffQpSeconds += elapsedSeconds(t0);
  }
  report.caratheodorySeconds /= queries;
  report.bvnSeconds /= queries;
  report.sphereSeconds /= queries;
  report.birkhoffQpSeconds /= queries;
  return report;
}

}  // namespace expofront
