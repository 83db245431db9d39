#include "expofront/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "expofront/expohedron.hpp"

namespace expofront {

CtrlResult ctrlSimulate(const QueryInstance& inst, double gain, int horizon,
                        bool keepDeliveries) {
  validateInstance(inst);
  if (gain < 0.0) throw InvalidArgument("gain must be >= 0");
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");

  const int n = inst.itemCount();
  const int g = inst.groupCount();
  const std::vector<double>& gamma = inst.exposureWeights;

  std::vector<double> groupSize(g, 0.0);
  for (int i = 0; i < n; ++i) groupSize[inst.groupOf[i]] += 1.0;

  const Expohedron poly(gamma);
  const double prpUtility =
      utilityOf(poly.maxUtilityVertex(inst.relevance), inst.relevance);

  CtrlResult out;
  out.cumulativeGroupExposure.assign(g, 0.0);
  out.trajectory.reserve(horizon);
  if (keepDeliveries) out.deliveries.reserve(horizon);

  std::vector<double> score(n);
  std::vector<int> order(n);
  double utilitySum = 0.0;

  for (int t = 1; t <= horizon; ++t) {
    // Deficit of each group against its per-delivery target rate.
    for (int i = 0; i < n; ++i) {
      const int j = inst.groupOf[i];
      const double deficit =
          inst.targetExposure[j] * (t - 1) - out.cumulativeGroupExposure[j];
      score[i] = inst.relevance[i] + gain * deficit / groupSize[j];
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return score[a] > score[b]; });

    double stepUtility = 0.0;
    for (int rank = 0; rank < n; ++rank) {
      const int item = order[rank];
      stepUtility += inst.relevance[item] * gamma[rank];
      out.cumulativeGroupExposure[inst.groupOf[item]] += gamma[rank];
    }
    utilitySum += stepUtility;

    double sq = 0.0;
    for (int j = 0; j < g; ++j) {
      const double d =
          out.cumulativeGroupExposure[j] / t - inst.targetExposure[j];
      sq += d * d;
    }
    out.trajectory.push_back({stepUtility, std::sqrt(sq)});
    if (keepDeliveries) out.deliveries.emplace_back(order);
  }

  out.deliveriesDone = horizon;
  out.finalNdcg = utilitySum / horizon / prpUtility;
  out.finalUnfairness = out.trajectory.back().cumulativeUnfairness;
  return out;
}

}  // namespace expofront
