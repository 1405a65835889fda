#include "rudu/mcts/search.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "rudu/error.hpp"
#include "rudu/selfplay/ranked_reward.hpp"

namespace rudu::mcts {

void SearchConfig::validate() const {
  require(simulations >= 1, "simulations must be >= 1");
  require(c_puct > 0.0, "c_puct must be > 0");
  require(dirichlet_epsilon >= 0.0 && dirichlet_epsilon <= 1.0, "dirichlet epsilon must be in [0, 1]");
  require(dirichlet_alpha > 0.0, "dirichlet alpha must be > 0");
  require(temperature >= 0.0, "temperature must be >= 0");
}

Expansion NetEvaluator::expand(const pack::PackState& state) {
  const auto input = state.encode();
  const auto mask = state.legal_mask();
  auto out = nn::forward(params_, input, mask);
  return {std::move(out.policy), out.value};
}

double NetEvaluator::terminal_value(const pack::PackState& state) {
  return selfplay::rank_against(state.terminal_reward(), threshold_, rng_);
}

Expansion RolloutEvaluator::expand(const pack::PackState& state) {
  const auto legal = state.legal_actions();
  Expansion out;
  out.priors.assign(static_cast<std::size_t>(state.action_space()), 0.0);
  for (const auto& a : legal) out.priors[state.action_index(a)] = 1.0 / static_cast<double>(legal.size());
  pack::PackState playout = state;
  while (!playout.is_terminal()) {
    const auto moves = playout.legal_actions();
    std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
    playout.apply(moves[pick(rng_)]);
  }
  out.value = playout.terminal_reward();
  return out;
}

double RolloutEvaluator::terminal_value(const pack::PackState& state) {
  return state.terminal_reward();
}

SearchTree::SearchTree(const pack::PackState& root, LeafEvaluator& evaluator,
                       const SearchConfig& config, std::mt19937_64& rng)
    : evaluator_(evaluator), config_(config), rng_(rng) {
  config_.validate();
  require(!root.is_terminal(), "search root is terminal");
  make_node(root);
  if (config_.root_noise) add_root_noise();
}

int SearchTree::make_node(pack::PackState state) {
  Node node{.state = std::move(state)};
  node.visits = 1;
  if (node.state.is_terminal()) {
    node.terminal = true;
    node.leaf_value = evaluator_.terminal_value(node.state);
  } else {
    auto expansion = evaluator_.expand(node.state);
    double total = 0.0;
    for (const auto& a : node.state.legal_actions()) {
      const int index = node.state.action_index(a);
      node.edges.push_back({index, expansion.priors[index]});
      total += expansion.priors[index];
    }
    for (auto& e : node.edges) {
      e.prior = total > 0.0 ? e.prior / total : 1.0 / static_cast<double>(node.edges.size());
    }
    node.leaf_value = expansion.value;  // leaf value of the expansion visit
  }
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

void SearchTree::add_root_noise() {
  auto& edges = nodes_.front().edges;
  if (config_.dirichlet_epsilon <= 0.0 || edges.empty()) return;
  std::gamma_distribution<double> gamma(config_.dirichlet_alpha, 1.0);
  std::vector<double> noise(edges.size());
  double total = 0.0;
  for (auto& n : noise) {
    n = gamma(rng_);
    total += n;
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double eta = total > 0.0 ? noise[i] / total : 1.0 / static_cast<double>(edges.size());
    edges[i].prior = (1.0 - config_.dirichlet_epsilon) * edges[i].prior + config_.dirichlet_epsilon * eta;
  }
}

int SearchTree::select_edge(const Node& node) const {
  const double explore = config_.c_puct * std::sqrt(static_cast<double>(node.visits));
  int best = 0;
  double best_score = -INFINITY;
  for (int i = 0; i < static_cast<int>(node.edges.size()); ++i) {
    const Edge& e = node.edges[i];
    if (config_.untried_first && e.visits == 0) return i;
    const double score = e.q() + explore * e.prior / (1.0 + e.visits);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

void SearchTree::simulate() {
  std::vector<std::pair<int, int>> path;
  int current = 0;
  double value = 0.0;
  for (;;) {
    Node& node = nodes_[current];
    if (node.terminal) {
      value = node.leaf_value;
      break;
    }
    const int edge = select_edge(node);
    path.emplace_back(current, edge);
    const int child = node.edges[edge].child;
    if (child < 0) {
      auto next = node.state;
      next.apply(next.action_at(node.edges[edge].action));
      const int created = make_node(std::move(next));
      nodes_[current].edges[edge].child = created;
      value = nodes_[created].leaf_value;
      break;
    }
    current = child;
    ++nodes_[current].visits;
  }
  ++nodes_.front().visits;
  for (const auto& [n, e] : path) {
    Edge& edge = nodes_[n].edges[e];
    ++edge.visits;
    edge.value_sum += value;
  }
  if (hook_) hook_(path, value);
}

void SearchTree::run(int simulations) {
  require(simulations >= 1, "simulations must be >= 1");
  for (int i = 0; i < simulations; ++i) simulate();
}

SearchResult SearchTree::result(double temperature) const {
  const Node& root = nodes_.front();
  SearchResult out;
  out.visits.assign(static_cast<std::size_t>(root.state.action_space()), 0);
  double value_sum = 0.0;
  int visit_sum = 0;
  for (const auto& e : root.edges) {
    out.visits[e.action] = e.visits;
    value_sum += e.value_sum;
    visit_sum += e.visits;
  }
  out.value = visit_sum > 0 ? value_sum / visit_sum : 0.0;
  out.policy = visit_policy(out.visits, temperature);
  return out;
}

bool SearchTree::advance(int action) {
  const Node& root = nodes_.front();
  int start = -1;
  for (const auto& e : root.edges) {
    if (e.action == action) start = e.child;
  }
  if (start < 0 || nodes_[start].terminal) return false;

  std::vector<Node> kept;
  std::vector<int> remap(nodes_.size(), -1);
  std::vector<int> order{start};
  remap[start] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& e : nodes_[order[i]].edges) {
      if (e.child >= 0) {
        remap[e.child] = static_cast<int>(order.size());
        order.push_back(e.child);
      }
    }
  }
  kept.reserve(order.size());
  for (int old : order) {
    Node node = std::move(nodes_[old]);
    for (auto& e : node.edges) {
      if (e.child >= 0) e.child = remap[e.child];
    }
    kept.push_back(std::move(node));
  }
  nodes_ = std::move(kept);
  if (config_.root_noise) add_root_noise();
  return true;
}

std::string SearchTree::dump() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : n.edges) {
      const auto a = n.state.action_at(e.action);
      edges.push_back({{"item", a.item}, {"x", a.x}, {"prior", e.prior}, {"visits", e.visits},
                       {"q", e.q()}, {"child", e.child}});
    }
    nodes.push_back({{"id", i}, {"visits", n.visits}, {"terminal", n.terminal},
                     {"step", n.state.step_count()}, {"leaf_value", n.leaf_value},
                     {"edges", std::move(edges)}});
  }
  return nlohmann::json{{"nodes", std::move(nodes)}}.dump(2);
}

std::vector<double> visit_policy(std::span<const int> visits, double temperature) {
  std::vector<double> policy(visits.size(), 0.0);
  const auto best = std::max_element(visits.begin(), visits.end());  // first maximum
  if (best == visits.end() || *best == 0) return policy;
  if (temperature <= kGreedyTemperature) {
    policy[static_cast<std::size_t>(best - visits.begin())] = 1.0;
    return policy;
  }
  double total = 0.0;
  for (std::size_t a = 0; a < visits.size(); ++a) {
    if (visits[a] == 0) continue;
    // scaled by the max count to keep small temperatures finite
    policy[a] = std::pow(static_cast<double>(visits[a]) / *best, 1.0 / temperature);
    total += policy[a];
  }
  for (auto& p : policy) p /= total;
  return policy;
}

int sample_action(std::span<const double> policy, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  int last = -1;
  for (std::size_t a = 0; a < policy.size(); ++a) {
    if (policy[a] <= 0.0) continue;
    cumulative += policy[a];
    last = static_cast<int>(a);
    if (u < cumulative) return last;
  }
  require(last >= 0, "cannot sample from an empty policy");
  return last;
}

SearchResult search(const pack::PackState& root, const nn::ModelParams& params,
                    const SearchConfig& config, double threshold, std::mt19937_64& rng) {
  NetEvaluator evaluator(params, threshold, rng);
  SearchTree tree(root, evaluator, config, rng);
  tree.run(config.simulations);
  return tree.result(config.temperature);
}

SearchResult rollout_search(const pack::PackState& root, int simulations, std::mt19937_64& rng,
                            double c_puct, double temperature) {
  SearchConfig config;
  config.simulations = simulations;
  config.c_puct = c_puct;
  config.temperature = temperature;
  config.untried_first = true;
  RolloutEvaluator evaluator(rng);
  SearchTree tree(root, evaluator, config, rng);
  tree.run(simulations);
  return tree.result(temperature);
}

}  // namespace rudu::mcts
