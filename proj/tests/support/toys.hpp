#pragma once

// Small hand-checkable instances shared across the test suites.

#include "expofront/core.hpp"

namespace testsupport {

// Two items, one per group, gamma = (1, 0.5), rho = (1.0, 0.2).
inline expofront::QueryInstance toy2(
    expofront::TargetPolicy policy =
        expofront::TargetPolicy::SizeProportional) {
  expofront::QueryInstance inst;
  inst.queryId = "toy2";
  inst.relevance = {1.0, 0.2};
  inst.groupOf = {0, 1};
  inst.exposureWeights = {1.0, 0.5};
  return expofront::withTarget(std::move(inst), {policy, {}});
}

// Three items, groups {0,1} vs {2}, DCG weights, rho = (0.9, 0.6, 0.1),
// size-proportional target.
inline expofront::QueryInstance toy3() {
  expofront::QueryInstance inst;
  inst.queryId = "toy3";
  inst.relevance = {0.9, 0.6, 0.1};
  inst.groupOf = {0, 0, 1};
  inst.exposureWeights = expofront::dcgExposure(3);
  return expofront::withTarget(
      std::move(inst), {expofront::TargetPolicy::SizeProportional, {}});
}

}  // namespace testsupport
