#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rudu/mcts/search.hpp"
#include "rudu/nn/net.hpp"
#include "rudu/pack/instance.hpp"
#include "rudu/selfplay/ranked_reward.hpp"

namespace rudu::selfplay {

/// Sliced training instances: W* = width, H* ~ U{h_min..h_max}.
struct InstanceDistribution {
  int width = 15;
  int height = 15;  // virtual height H'
  int h_min = 2;
  int h_max = 15;
  int n_items = 10;
};

struct TrainConfig {
  int iterations = 300;            // K
  int episodes_per_iteration = 20; // J
  double percentile = 75.0;        // alpha
  int train_steps = 200;           // tau
  int batch_size = 64;
  double learning_rate = 1e-3;
  double l2 = 0.0;
  int buffer_capacity = 100;
  InstanceDistribution instances;
  int conv_layers = 3;
  int channels = 32;
  mcts::SearchConfig search{.simulations = 200, .root_noise = true};
  bool adjacency_mask = false;
  // Each minibatch sample gets a random item relabelling and left-right
  // mirror. Both are exact symmetries of the packing problem.
  bool augment = false;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  int checkpoint_every = 10;
  bool record_wall_time = true;

  /// 15 x 15 bins, 10 items, 200 simulations, 300 iterations of 20 episodes.
  static TrainConfig full();
  /// 8 x 8 bins, 5 items, 64 simulations, 50 iterations of 10 episodes,
  /// symmetry augmentation on.
  static TrainConfig desk();

  nn::NetConfig net_config() const;
  pack::PackOptions pack_options() const;
  void validate() const;
};

/// Applies an item permutation (`order[new_id] = old_id`) and optionally a
/// left-right mirror to a sample of an n_items x height x width problem.
nn::Sample transform_sample(const nn::Sample& sample, int n_items, int height, int width,
                            std::span<const int> order, bool mirror);

/// transform_sample with a uniformly random permutation and mirror.
nn::Sample augment_sample(const nn::Sample& sample, int n_items, int height, int width,
                          std::mt19937_64& rng);

nlohmann::json train_config_to_json(const TrainConfig& config);
/// Strict: unknown keys are rejected. Missing keys keep the values of `base`.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

struct IterationMetrics {
  int iteration = 0;
  double mean_reward = 0.0;
  double reward_std = 0.0;
  double optimality_ratio = 0.0;
  double loss = 0.0;
  double wall_seconds = 0.0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const IterationMetrics& m);

struct Episode {
  std::vector<nn::Sample> samples;  // z filled in by the caller
  double reward = 0.0;
  int h_tilde = 0;
  bool optimal = false;
  bool dead = false;
};

/// Plays one instance with search-guided moves. Greedy mode takes the most
/// visited action; otherwise actions are sampled from the search policy.
Episode play_episode(const nn::ModelParams& params, const pack::Instance& instance,
                     const mcts::SearchConfig& search, const pack::PackOptions& options,
                     double threshold, std::mt19937_64& rng, bool greedy);

/// Instance `episode` of training iteration `iteration`.
pack::Instance training_instance(const TrainConfig& config, int iteration, int episode);

/// Model snapshot plus the reward history needed to rank during search.
struct Checkpoint {
  nn::ModelParams params;
  TrainConfig config;
  int iteration = 0;
  std::string rng_state;
  std::vector<double> reward_buffer;  // B'

  double threshold() const;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& bin_path);
/// Reads `path` and its `.json` sidecar.
Checkpoint load_checkpoint(const std::filesystem::path& bin_path);

/// Ranked-reward self-play loop. One call to step() is one training iteration.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  IterationMetrics step();

  int iteration() const { return iteration_; }
  const TrainConfig& config() const { return config_; }
  const nn::ModelParams& params() const { return params_; }
  const RewardBuffers& buffers() const { return buffers_; }
  Checkpoint checkpoint() const;

 private:
  TrainConfig config_;
  nn::ModelParams params_;
  nn::Adam optimizer_;
  RewardBuffers buffers_;
  std::mt19937_64 rng_;
  int iteration_ = 0;
};

struct TrainResult {
  Checkpoint final;
  std::vector<IterationMetrics> metrics;
};

/// Runs every iteration. With a run directory, writes config.json,
/// metrics.csv and checkpoints/iter_%04d.{bin,json}.
TrainResult run_training(const TrainConfig& config,
                         const std::optional<std::filesystem::path>& run_dir = std::nullopt,
                         const std::function<void(const IterationMetrics&)>& progress = {});

}  // namespace rudu::selfplay
