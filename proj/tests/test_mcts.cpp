#include <map>
#include <random>

#include "doctest.h"
#include "rudu/error.hpp"
#include "rudu/mcts/search.hpp"
#include "rudu/pack/generator.hpp"
#include "rudu/selfplay/ranked_reward.hpp"

using namespace rudu;
using namespace rudu::pack;
using namespace rudu::mcts;

namespace {

// Uniform priors, neutral value, terminal rewards ranked against a threshold.
class UniformRanked : public LeafEvaluator {
 public:
  UniformRanked(double threshold, std::mt19937_64& rng) : threshold_(threshold), rng_(rng) {}
  Expansion expand(const PackState& state) override {
    Expansion e;
    e.priors.assign(state.action_space(), 0.0);
    const auto legal = state.legal_actions();
    for (const auto& a : legal) e.priors[state.action_index(a)] = 1.0 / legal.size();
    return e;
  }
  double terminal_value(const PackState& state) override {
    return selfplay::rank_against(state.terminal_reward(), threshold_, rng_);
  }

 private:
  double threshold_;
  std::mt19937_64& rng_;
};

// Items (1,1) and (2,1) in a 3-wide bin with the 1x1 already at x = 0.
// The 2x1 at x = 1 completes row 0 (r = 1); at x = 0 it lands on row 1 (r = 0.5).
PackState toy_state() {
  PackState s(make_instance(3, {{1, 1}, {2, 1}}));
  s.apply({0, 0});
  return s;
}

int argmax(const std::vector<int>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("toy state has the expected two outcomes") {
  const auto s = toy_state();
  REQUIRE(s.legal_actions().size() == 2);
  CHECK(std::get<1>(step(s, {1, 1})) == 1.0);
  CHECK(std::get<1>(step(s, {1, 0})) == 0.5);
}

TEST_CASE("forced move") {
  PackState s(make_instance(3, {{3, 1}}));
  std::mt19937_64 rng(1);
  const auto r = rollout_search(s, 20, rng);
  CHECK(r.policy[s.action_index({0, 0})] == 1.0);
  UniformRanked eval(0.5, rng);
  SearchTree tree(s, eval, {.simulations = 10}, rng);
  tree.run(10);
  CHECK(tree.result(1.0).policy[0] == 1.0);
}

TEST_CASE("PUCT concentrates on the winning action") {
  const auto s = toy_state();
  std::mt19937_64 rng(2);
  UniformRanked eval(0.75, rng);
  SearchTree tree(s, eval, {.simulations = 1000}, rng);
  tree.run(1000);
  const auto r = tree.result(1.0);
  CHECK(r.policy[s.action_index({1, 1})] >= 0.9);
  int total = 0;
  for (int v : r.visits) total += v;
  CHECK(total == 1000);
}

TEST_CASE("rollout search prefers the perfect pack") {
  const auto s = toy_state();
  std::mt19937_64 rng(3);
  const auto r = rollout_search(s, 500, rng);
  CHECK(argmax(r.visits) == s.action_index({1, 1}));
  CHECK_THROWS_AS(rollout_search(s, 0, rng), Error);
}

TEST_CASE("visit conservation, legality and backup sums") {
  const auto inst = generate_sliced_instance(6, 4, 5, 9);
  PackState root(inst);
  std::mt19937_64 rng(4);
  UniformRanked eval(0.8, rng);
  SearchTree tree(root, eval, {.simulations = 300, .root_noise = true}, rng);

  std::map<std::pair<int, int>, double> logged;
  tree.set_backup_hook([&](std::span<const std::pair<int, int>> path, double value) {
    for (const auto& step : path) logged[step] += value;
  });
  tree.run(300);

  int root_total = 0;
  for (const auto& e : tree.root().edges) root_total += e.visits;
  CHECK(root_total == 300);

  const auto& nodes = tree.nodes();
  for (int n = 0; n < static_cast<int>(nodes.size()); ++n) {
    const auto& node = nodes[n];
    int child_visits = 0;
    for (int e = 0; e < static_cast<int>(node.edges.size()); ++e) {
      const auto& edge = node.edges[e];
      child_visits += edge.visits;
      REQUIRE(node.state.is_legal(node.state.action_at(edge.action)));
      const auto it = logged.find({n, e});
      const double sum = it == logged.end() ? 0.0 : it->second;
      REQUIRE(edge.value_sum == doctest::Approx(sum).epsilon(1e-12));
    }
    if (!node.terminal) REQUIRE(node.visits == 1 + child_visits);
  }

  const auto r = tree.result(1.0);
  double total = 0.0;
  for (int a = 0; a < root.action_space(); ++a) {
    if (r.policy[a] > 0) REQUIRE(root.is_legal(root.action_at(a)));
    total += r.policy[a];
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("visit policy temperature") {
  const std::vector<int> visits{3, 9, 0, 9, 1};
  const auto greedy = visit_policy(visits, 0.0);
  CHECK(greedy == std::vector<double>{0, 1, 0, 0, 0});
  CHECK(visit_policy(visits, kGreedyTemperature) == greedy);
  const auto cold = visit_policy(std::vector<int>{3, 10, 0, 9, 1}, 0.05);
  CHECK(std::max_element(cold.begin(), cold.end()) - cold.begin() == 1);
  const auto warm = visit_policy(visits, 1.0);
  CHECK(warm[0] == doctest::Approx(3.0 / 22.0));
}

TEST_CASE("tree reuse keeps the chosen subtree") {
  const auto inst = generate_sliced_instance(6, 4, 4, 2);
  PackState root(inst);
  std::mt19937_64 rng(6);
  UniformRanked eval(0.8, rng);
  SearchTree tree(root, eval, {.simulations = 100}, rng);
  tree.run(100);
  const auto r = tree.result(0.0);
  const int best = static_cast<int>(std::max_element(r.visits.begin(), r.visits.end()) - r.visits.begin());
  int kept = 0;
  for (const auto& e : tree.root().edges)
    if (e.action == best) kept = e.visits;
  REQUIRE(tree.advance(best));
  auto expected = root;
  expected.apply(root.action_at(best));
  CHECK(tree.root().state.grid() == expected.grid());
  int total = 0;
  for (const auto& e : tree.root().edges) total += e.visits;
  CHECK(tree.root().visits == 1 + total);
  CHECK(tree.root().visits == kept);
}

TEST_CASE("network search is seeded") {
  const auto inst = generate_sliced_instance(8, 5, 5, 1);
  PackState root(inst);
  const auto params = nn::ModelParams::initialize(nn::NetConfig::for_problem(5, 8, 8, 2, 8), 1);
  std::mt19937_64 a(10), b(10);
  const auto ra = search(root, params, {.simulations = 32, .root_noise = true}, 0.5, a);
  const auto rb = search(root, params, {.simulations = 32, .root_noise = true}, 0.5, b);
  CHECK(ra.visits == rb.visits);
  CHECK(ra.value == rb.value);
}
