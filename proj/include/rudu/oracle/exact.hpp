#pragma once

#include <cstdint>
#include <vector>

#include "rudu/pack/instance.hpp"
#include "rudu/pack/state.hpp"

namespace rudu::oracle {

struct OracleResult {
  int min_height = 0;
  std::vector<pack::Action> witness;
  std::uint64_t nodes_expanded = 0;
};

struct OracleLimits {
  std::uint64_t node_limit = 50'000'000;
  bool adjacency_mask = false;
};

/// Exhaustive minimum-height search over every (item, x) ordering under the
/// bottom-up allocation rule. Caps are tried from the lower bound upward and
/// each cap is a memoized depth-first search over (grid, packed-set) states.
///
/// Throws rudu::Error(infeasible) when nothing fits under `h_cap` and
/// rudu::Error(budget_exceeded) when the node limit is reached.
OracleResult solve_exact(const pack::Instance& instance, int h_cap, OracleLimits limits = {});

}  // namespace rudu::oracle
