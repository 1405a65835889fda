#pragma once

#include <cstdint>
#include <vector>

#include "rudu/pack/state.hpp"

// Deterministic baseline packers. Both are reimplementations in the spirit
// of the published HVRAA and Lego heuristics, not bit-faithful ports.

namespace rudu::heuristics {

struct TraceStep {
  pack::Action action;
  int height_after = 0;
};

struct HeuristicResult {
  pack::PackState state;
  std::vector<TraceStep> trace{};
  bool dead = false;
};

/// Tallest first (ties: wider, then lower id); each item goes to the legal x
/// minimizing the resulting filled height, leftmost on ties.
HeuristicResult hvraa_solve(const pack::Instance& instance, pack::PackOptions options = {});

/// Widest first (ties: taller, then lower id); an item stacks on the lowest
/// existing stack of equal width when that placement is legal, otherwise it
/// falls back to the HVRAA column choice.
HeuristicResult lego_solve(const pack::Instance& instance, pack::PackOptions options = {});

/// Uniformly random legal action at every step.
HeuristicResult random_solve(const pack::Instance& instance, std::uint64_t seed,
                             pack::PackOptions options = {});

}  // namespace rudu::heuristics
