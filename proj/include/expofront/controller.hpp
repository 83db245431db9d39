#pragma once

#include <vector>

#include "expofront/core.hpp"

namespace expofront {

struct CtrlStep {
  double stepUtility = 0.0;
  double cumulativeUnfairness = 0.0;  // ||cumExposure/t - target||
};

struct CtrlResult {
  std::vector<Permutation> deliveries;  // filled when requested
  std::vector<CtrlStep> trajectory;
  std::vector<double> cumulativeGroupExposure;
  int deliveriesDone = 0;
  double finalNdcg = 0.0;        // mean per-delivery utility / PRP utility
  double finalUnfairness = 0.0;  // ||cumExposure/T - target||
};

/// Greedy per-delivery baseline: before each delivery every item gets a
/// relevance bonus proportional to its group's exposure deficit against the
/// per-delivery target rate, normalized by group size; items are ranked by
/// the bonused score. gain = 0 reproduces the PRP ranking every time.
CtrlResult ctrlSimulate(const QueryInstance& inst, double gain, int horizon,
                        bool keepDeliveries = false);

}  // namespace expofront
