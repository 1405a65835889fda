#include "rudu/heuristics/heuristics.hpp"

#include <algorithm>
#include <optional>
#include <random>

namespace rudu::heuristics {

namespace {

using pack::Action;
using pack::Item;
using pack::PackState;

// Filled height after placing `item` at `x`, or -1 when illegal.
int height_if_placed(const PackState& state, const Item& item, int x) {
  if (!state.is_legal({item.id, x})) return -1;
  const int top = pack::allocation_top(state.grid(), x, item.w, item.h);
  return std::max(state.filled_height(), top + 1);
}

std::optional<int> best_column(const PackState& state, const Item& item) {
  std::optional<int> best;
  int best_height = 0;
  for (int x = 0; x + item.w <= state.width(); ++x) {
    const int h = height_if_placed(state, item, x);
    if (h < 0) continue;
    if (!best || h < best_height) {
      best = x;
      best_height = h;
    }
  }
  return best;
}

void place(HeuristicResult& result, const Action& a) {
  result.state.apply(a);
  result.trace.push_back({a, result.state.filled_height()});
}

std::vector<Item> sorted_items(const pack::Instance& instance, bool by_height) {
  std::vector<Item> items = instance.items;
  std::sort(items.begin(), items.end(), [by_height](const Item& a, const Item& b) {
    const int a1 = by_height ? a.h : a.w, b1 = by_height ? b.h : b.w;
    const int a2 = by_height ? a.w : a.h, b2 = by_height ? b.w : b.h;
    if (a1 != b1) return a1 > b1;
    if (a2 != b2) return a2 > b2;
    return a.id < b.id;
  });
  return items;
}

}  // namespace

HeuristicResult hvraa_solve(const pack::Instance& instance, pack::PackOptions options) {
  HeuristicResult result{.state = PackState(instance, options)};
  for (const auto& item : sorted_items(instance, true)) {
    const auto x = best_column(result.state, item);
    if (!x) {
      result.dead = true;
      break;
    }
    place(result, {item.id, *x});
  }
  return result;
}

HeuristicResult lego_solve(const pack::Instance& instance, pack::PackOptions options) {
  HeuristicResult result{.state = PackState(instance, options)};
  for (const auto& item : sorted_items(instance, false)) {
    // stacks of equal width, keyed by x, with their current top row
    std::optional<int> stack_x;
    int stack_top = 0;
    for (const auto& p : result.state.grid().placements()) {
      if (p.w != item.w) continue;
      const int top = p.rows.back();
      bool lower = true;
      for (const auto& q : result.state.grid().placements()) {
        if (q.w == item.w && q.x == p.x && q.rows.back() > top) lower = false;
      }
      if (!lower) continue;  // p is not the top of its stack
      if (!result.state.is_legal({item.id, p.x})) continue;
      if (!stack_x || top < stack_top || (top == stack_top && p.x < *stack_x)) {
        stack_x = p.x;
        stack_top = top;
      }
    }
    std::optional<int> x = stack_x ? stack_x : best_column(result.state, item);
    if (!x) {
      result.dead = true;
      break;
    }
    place(result, {item.id, *x});
  }
  return result;
}

HeuristicResult random_solve(const pack::Instance& instance, std::uint64_t seed,
                             pack::PackOptions options) {
  HeuristicResult result{.state = PackState(instance, options)};
  std::mt19937_64 rng(seed);
  while (!result.state.is_terminal()) {
    const auto legal = result.state.legal_actions();
    std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
    place(result, legal[pick(rng)]);
  }
  result.dead = result.state.is_dead();
  return result;
}

}  // namespace rudu::heuristics
