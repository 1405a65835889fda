#pragma once

#include <functional>
#include <string>
#include <random>
#include <span>
#include <vector>

#include "rudu/nn/net.hpp"
#include "rudu/pack/state.hpp"

namespace rudu::mcts {

struct SearchConfig {
  int simulations = 200;
  double c_puct = 1.5;
  double dirichlet_epsilon = 0.25;
  double dirichlet_alpha = 1.0;
  double temperature = 1.0;  // <= kGreedyTemperature selects argmax
  bool root_noise = false;
  bool reuse_tree = false;
  // Untried edges are selected before any edge is revisited (plain UCT).
  // Otherwise an unvisited edge scores Q = 0.
  bool untried_first = false;

  void validate() const;
};

inline constexpr double kGreedyTemperature = 1e-3;

/// Priors over the full action space plus a value for a non-terminal state.
struct Expansion {
  std::vector<double> priors;
  double value = 0.0;
};

class LeafEvaluator {
 public:
  virtual ~LeafEvaluator() = default;
  virtual Expansion expand(const pack::PackState& state) = 0;
  virtual double terminal_value(const pack::PackState& state) = 0;
};

/// Network priors and value; terminal states are ranked against the
/// current reward threshold.
class NetEvaluator : public LeafEvaluator {
 public:
  NetEvaluator(const nn::ModelParams& params, double threshold, std::mt19937_64& rng)
      : params_(params), threshold_(threshold), rng_(rng) {}

  Expansion expand(const pack::PackState& state) override;
  double terminal_value(const pack::PackState& state) override;

 private:
  const nn::ModelParams& params_;
  double threshold_;
  std::mt19937_64& rng_;
};

/// Uniform priors; leaves are valued by the raw reward of one uniform-random
/// playout.
class RolloutEvaluator : public LeafEvaluator {
 public:
  explicit RolloutEvaluator(std::mt19937_64& rng) : rng_(rng) {}

  Expansion expand(const pack::PackState& state) override;
  double terminal_value(const pack::PackState& state) override;

 private:
  std::mt19937_64& rng_;
};

struct Edge {
  int action = 0;
  double prior = 0.0;
  int visits = 0;
  double value_sum = 0.0;
  int child = -1;

  double q() const { return visits > 0 ? value_sum / visits : 0.0; }
};

struct Node {
  pack::PackState state;
  bool terminal = false;
  double leaf_value = 0.0;  // terminal score, or the value from expansion
  int visits = 0;
  std::vector<Edge> edges{};
};

struct SearchResult {
  std::vector<double> policy;  // over the full action space
  std::vector<int> visits;
  double value = 0.0;          // mean backed-up value at the root
};

/// Single-player PUCT tree. Values are absolute, so backup adds the leaf
/// value along the path without sign changes.
class SearchTree {
 public:
  using BackupHook = std::function<void(std::span<const std::pair<int, int>> path, double value)>;

  SearchTree(const pack::PackState& root, LeafEvaluator& evaluator, const SearchConfig& config,
             std::mt19937_64& rng);

  void simulate();
  void run(int simulations);

  SearchResult result(double temperature) const;

  /// Keeps the subtree under `action` as the new root. Returns false (and
  /// leaves the tree unchanged) when that child was never expanded.
  bool advance(int action);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }

  /// Called after every simulation with the (node, edge) path and leaf value.
  void set_backup_hook(BackupHook hook) { hook_ = std::move(hook); }

  /// Tree statistics as JSON text.
  std::string dump() const;

 private:
  int make_node(pack::PackState state);
  int select_edge(const Node& node) const;
  void add_root_noise();

  LeafEvaluator& evaluator_;
  SearchConfig config_;
  std::mt19937_64& rng_;
  std::vector<Node> nodes_;
  BackupHook hook_;
};

/// pi(a) proportional to N(a)^(1 / temperature); argmax (lowest index on
/// ties) at or below kGreedyTemperature.
std::vector<double> visit_policy(std::span<const int> visits, double temperature);

/// Samples an action index from a probability vector.
int sample_action(std::span<const double> policy, std::mt19937_64& rng);

/// Network-guided search from `root`.
SearchResult search(const pack::PackState& root, const nn::ModelParams& params,
                    const SearchConfig& config, double threshold, std::mt19937_64& rng);

/// Plain Monte-Carlo rollout search with the same tree mechanics, except
/// that untried edges go first: raw rewards lie in [0, 1], so Q = 0 for an
/// unvisited edge would pin the search to the first child it rolls out.
SearchResult rollout_search(const pack::PackState& root, int simulations, std::mt19937_64& rng,
                            double c_puct = 1.5, double temperature = 1.0);

}  // namespace rudu::mcts
