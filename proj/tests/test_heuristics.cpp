#include "doctest.h"
#include "rudu/heuristics/heuristics.hpp"
#include "rudu/oracle/exact.hpp"
#include "rudu/pack/generator.hpp"

using namespace rudu;
using namespace rudu::pack;
using namespace rudu::heuristics;

TEST_CASE("hvraa") {
  const auto one = hvraa_solve(make_instance(6, {{3, 2}}));
  REQUIRE(one.trace.size() == 1);
  CHECK(one.trace[0].action == Action{0, 0});

  const auto twins = hvraa_solve(make_instance(4, {{2, 2}, {2, 2}}));
  CHECK(twins.state.filled_height() == 2);
  CHECK(twins.trace[0].action == Action{0, 0});
  CHECK(twins.trace[1].action == Action{1, 2});

  // (2,3) first at x=0, then (3,2) at x=2, then (2,1) on top of (3,2).
  const auto inst = make_instance(5, {{3, 2}, {2, 3}, {2, 1}});
  const auto r = hvraa_solve(inst);
  REQUIRE(r.trace.size() == 3);
  CHECK(r.trace[0].action == Action{1, 0});
  CHECK(r.trace[1].action == Action{0, 2});
  CHECK(r.trace[2].action == Action{2, 2});
  CHECK(r.state.filled_height() == 3);
  CHECK(oracle::solve_exact(inst, 5).min_height == 3);
}

TEST_CASE("lego") {
  const auto one = lego_solve(make_instance(6, {{3, 2}}));
  CHECK(one.trace[0].action == Action{0, 0});

  const auto stack = lego_solve(make_instance(6, {{3, 2}, {3, 1}}));
  CHECK(stack.trace[1].action.x == stack.trace[0].action.x);
  CHECK(stack.state.filled_height() == 3);

  // Distinct widths reduce to the hvraa column rule on the same ordering.
  const auto distinct = make_instance(8, {{1, 3}, {2, 2}, {3, 4}, {4, 1}});
  const auto lego = lego_solve(distinct);
  PackState replica(distinct);
  for (const auto& step : lego.trace) {
    int best_x = -1;
    int best_h = 0;
    for (int x = 0; x + distinct.items[step.action.item].w <= replica.width(); ++x) {
      const Action a{step.action.item, x};
      if (!replica.is_legal(a)) continue;
      const int h = std::max(replica.filled_height(),
                             allocation_top(replica.grid(), x, distinct.items[a.item].w,
                                            distinct.items[a.item].h) + 1);
      if (best_x < 0 || h < best_h) {
        best_x = x;
        best_h = h;
      }
    }
    CHECK(step.action.x == best_x);
    replica.apply(step.action);
  }
}

TEST_CASE("random solver") {
  const auto forced = random_solve(make_instance(3, {{3, 1}}), 9);
  CHECK(forced.trace[0].action == Action{0, 0});

  const auto inst = generate_sliced_instance(8, 6, 6, 11);
  const auto a = random_solve(inst, 5);
  const auto b = random_solve(inst, 5);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].action == b.trace[i].action);

  const double best = replay(inst, oracle::solve_exact(inst, 8).witness).terminal_reward();
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) total += random_solve(inst, seed).state.terminal_reward();
  CHECK(total / 1000.0 < best);
}

TEST_CASE("heuristic outputs replay and are deterministic") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = generate_sliced_instance(8, 2 + static_cast<int>(seed % 7), 5, seed);
    for (const auto& r : {hvraa_solve(inst), lego_solve(inst)}) {
      std::vector<Action> actions;
      for (const auto& t : r.trace) actions.push_back(t.action);
      const auto s = replay(inst, actions);
      CHECK(s.grid() == r.state.grid());
      CHECK(r.dead == s.is_dead());
    }
    CHECK(hvraa_solve(inst).state.grid() == hvraa_solve(inst).state.grid());
  }
}
