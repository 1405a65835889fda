#include "rudu/selfplay/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "rudu/error.hpp"
#include "rudu/io/formats.hpp"
#include "rudu/pack/generator.hpp"
#include "rudu/util/parallel.hpp"

namespace rudu::selfplay {

using nlohmann::json;

TrainConfig TrainConfig::full() { return TrainConfig{}; }

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.iterations = 50;
  c.episodes_per_iteration = 10;
  c.augment = true;
  c.instances = {.width = 8, .height = 8, .h_min = 2, .h_max = 8, .n_items = 5};
  c.search.simulations = 64;
  c.checkpoint_every = 10;
  return c;
}

nn::NetConfig TrainConfig::net_config() const {
  return nn::NetConfig::for_problem(instances.n_items, instances.height, instances.width,
                                    conv_layers, channels);
}

pack::PackOptions TrainConfig::pack_options() const {
  return {.height = instances.height, .adjacency_mask = adjacency_mask};
}

void TrainConfig::validate() const {
  require(iterations >= 1, "iterations must be >= 1");
  require(episodes_per_iteration >= 1, "episodes_per_iteration must be >= 1");
  require(percentile > 0.0 && percentile < 100.0, "percentile must be in (0, 100)");
  require(train_steps >= 0, "train_steps must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(learning_rate >= 0.0, "learning_rate must be >= 0");
  require(l2 >= 0.0, "l2 must be >= 0");
  require(buffer_capacity >= 1, "buffer_capacity must be >= 1");
  const auto& d = instances;
  require(d.width >= 1 && d.width <= 64, "instances.width must be in [1, 64]");
  require(d.height >= 1, "instances.height must be >= 1");
  require(d.h_min >= 1 && d.h_min <= d.h_max, "instances h range is empty");
  require(d.h_max <= d.height, "instances.h_max must not exceed the virtual height");
  require(d.n_items >= 1 && d.n_items <= 64, "instances.n_items must be in [1, 64]");
  require(d.n_items <= d.width * d.h_min, "n_items exceeds the cells of the smallest bin");
  require(checkpoint_every >= 0, "checkpoint_every must be >= 0");
  search.validate();
  net_config().validate();
}

nn::Sample transform_sample(const nn::Sample& sample, int n_items, int height, int width,
                            std::span<const int> order, bool mirror) {
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  require(sample.state.size() == plane * (n_items + 1), "sample has the wrong state size");
  require(static_cast<int>(order.size()) == n_items, "permutation has the wrong size");
  const auto column = [&](int c) { return mirror ? width - 1 - c : c; };

  nn::Sample out;
  out.z = sample.z;
  out.state.assign(sample.state.size(), 0.0);
  out.mask.assign(sample.mask.size(), 0);
  out.policy.assign(sample.policy.size(), 0.0);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out.state[r * width + column(c)] = sample.state[r * width + c];
  for (int id = 0; id < n_items; ++id) {
    const int old = order[id];
    // Item planes are left-anchored shape stencils, so they move unmirrored.
    std::copy_n(sample.state.begin() + plane * (old + 1), plane, out.state.begin() + plane * (id + 1));
    int w = 0;
    while (w < width && sample.state[plane * (old + 1) + w] != 0.0) ++w;
    for (int x = 0; x < width; ++x) {
      const std::size_t from = static_cast<std::size_t>(old) * width + x;
      if (!sample.mask[from]) continue;
      const int to_x = mirror ? width - w - x : x;
      const std::size_t to = static_cast<std::size_t>(id) * width + to_x;
      out.mask[to] = 1;
      out.policy[to] = sample.policy[from];
    }
  }
  return out;
}

nn::Sample augment_sample(const nn::Sample& sample, int n_items, int height, int width,
                          std::mt19937_64& rng) {
  std::vector<int> order(static_cast<std::size_t>(n_items));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const bool mirror = std::bernoulli_distribution(0.5)(rng);
  return transform_sample(sample, n_items, height, width, order, mirror);
}

json train_config_to_json(const TrainConfig& c) {
  return {
      {"iterations", c.iterations},
      {"episodes_per_iteration", c.episodes_per_iteration},
      {"percentile", c.percentile},
      {"train_steps", c.train_steps},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"l2", c.l2},
      {"buffer_capacity", c.buffer_capacity},
      {"instances",
       {{"width", c.instances.width},
        {"height", c.instances.height},
        {"h_min", c.instances.h_min},
        {"h_max", c.instances.h_max},
        {"n_items", c.instances.n_items}}},
      {"net", {{"conv_layers", c.conv_layers}, {"channels", c.channels}}},
      {"search",
       {{"simulations", c.search.simulations},
        {"c_puct", c.search.c_puct},
        {"dirichlet_epsilon", c.search.dirichlet_epsilon},
        {"dirichlet_alpha", c.search.dirichlet_alpha},
        {"temperature", c.search.temperature},
        {"root_noise", c.search.root_noise},
        {"reuse_tree", c.search.reuse_tree}}},
      {"adjacency_mask", c.adjacency_mask},
      {"augment", c.augment},
      {"seed", c.seed},
      {"threads", c.threads},
      {"checkpoint_every", c.checkpoint_every},
      {"record_wall_time", c.record_wall_time},
  };
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  try {
    io::reject_unknown_keys(j,
                            {"iterations", "episodes_per_iteration", "percentile", "train_steps",
                             "batch_size", "learning_rate", "l2", "buffer_capacity", "instances",
                             "net", "search", "adjacency_mask", "augment", "seed", "threads",
                             "checkpoint_every", "record_wall_time"},
                            "config");
    take(j, "iterations", c.iterations);
    take(j, "episodes_per_iteration", c.episodes_per_iteration);
    take(j, "percentile", c.percentile);
    take(j, "train_steps", c.train_steps);
    take(j, "batch_size", c.batch_size);
    take(j, "learning_rate", c.learning_rate);
    take(j, "l2", c.l2);
    take(j, "buffer_capacity", c.buffer_capacity);
    take(j, "adjacency_mask", c.adjacency_mask);
    take(j, "augment", c.augment);
    take(j, "seed", c.seed);
    take(j, "threads", c.threads);
    take(j, "checkpoint_every", c.checkpoint_every);
    take(j, "record_wall_time", c.record_wall_time);
    if (j.contains("instances")) {
      const auto& d = j["instances"];
      io::reject_unknown_keys(d, {"width", "height", "h_min", "h_max", "n_items"}, "config.instances");
      take(d, "width", c.instances.width);
      take(d, "height", c.instances.height);
      take(d, "h_min", c.instances.h_min);
      take(d, "h_max", c.instances.h_max);
      take(d, "n_items", c.instances.n_items);
    }
    if (j.contains("net")) {
      const auto& n = j["net"];
      io::reject_unknown_keys(n, {"conv_layers", "channels"}, "config.net");
      take(n, "conv_layers", c.conv_layers);
      take(n, "channels", c.channels);
    }
    if (j.contains("search")) {
      const auto& s = j["search"];
      io::reject_unknown_keys(s,
                              {"simulations", "c_puct", "dirichlet_epsilon", "dirichlet_alpha",
                               "temperature", "root_noise", "reuse_tree"},
                              "config.search");
      take(s, "simulations", c.search.simulations);
      take(s, "c_puct", c.search.c_puct);
      take(s, "dirichlet_epsilon", c.search.dirichlet_epsilon);
      take(s, "dirichlet_alpha", c.search.dirichlet_alpha);
      take(s, "temperature", c.search.temperature);
      take(s, "root_noise", c.search.root_noise);
      take(s, "reuse_tree", c.search.reuse_tree);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("config: ") + e.what());
  }
  return c;
}

std::string metrics_csv_header() {
  return "iteration,mean_reward,reward_std,optimality_ratio,loss,wall_seconds\n";
}

std::string metrics_csv_row(const IterationMetrics& m) {
  char line[256];
  std::snprintf(line, sizeof line, "%d,%.9f,%.9f,%.6f,%.9f,%.3f\n", m.iteration, m.mean_reward,
                m.reward_std, m.optimality_ratio, m.loss, m.wall_seconds);
  return line;
}

Episode play_episode(const nn::ModelParams& params, const pack::Instance& instance,
                     const mcts::SearchConfig& search, const pack::PackOptions& options,
                     double threshold, std::mt19937_64& rng, bool greedy) {
  pack::PackState state(instance, options);
  mcts::NetEvaluator evaluator(params, threshold, rng);
  std::optional<mcts::SearchTree> tree;
  Episode episode;
  while (!state.is_terminal()) {
    if (!tree) tree.emplace(state, evaluator, search, rng);
    tree->run(search.simulations);
    const auto result = tree->result(search.temperature);
    const int action = greedy ? static_cast<int>(std::max_element(result.visits.begin(), result.visits.end()) -
                                                 result.visits.begin())
                              : mcts::sample_action(result.policy, rng);
    episode.samples.push_back({state.encode(), state.legal_mask(), result.policy, 0.0});
    state.apply(state.action_at(action));
    if (!search.reuse_tree || state.is_terminal() || !tree->advance(action)) tree.reset();
  }
  episode.reward = state.terminal_reward();
  episode.h_tilde = state.filled_height();
  episode.dead = state.is_dead();
  episode.optimal = !episode.dead && pack::Rational(episode.h_tilde) == state.lower_bound();
  return episode;
}

pack::Instance training_instance(const TrainConfig& config, int iteration, int episode) {
  const auto seed = pack::derive_seed(pack::derive_seed(config.seed, 0x5eed0000u + iteration), episode);
  const auto& d = config.instances;
  return pack::sample_sliced_instance(d.width, d.h_min, d.h_max, d.n_items, seed);
}

double Checkpoint::threshold() const { return percentile_threshold(reward_buffer, config.percentile); }

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& bin_path) {
  auto temp = bin_path;
  temp += ".tmp";
  nn::save_params(checkpoint.params, temp);
  std::filesystem::rename(temp, bin_path);
  const auto& net = checkpoint.params.config();
  json sidecar = {
      {"schema", nn::kCheckpointSchema},
      {"config", train_config_to_json(checkpoint.config)},
      {"iteration", checkpoint.iteration},
      {"rng_state", checkpoint.rng_state},
      {"reward_buffer", checkpoint.reward_buffer},
      {"net",
       {{"input_planes", net.input_planes},
        {"height", net.height},
        {"width", net.width},
        {"conv_layers", net.conv_layers},
        {"channels", net.channels},
        {"action_space", net.action_space}}},
  };
  auto json_path = bin_path;
  json_path.replace_extension(".json");
  io::write_json_atomic(json_path, sidecar);
}

Checkpoint load_checkpoint(const std::filesystem::path& bin_path) {
  Checkpoint checkpoint;
  checkpoint.params = nn::load_params(bin_path);
  auto json_path = bin_path;
  json_path.replace_extension(".json");
  const auto sidecar = io::read_json(json_path);
  try {
    if (sidecar.at("schema").get<std::uint32_t>() != nn::kCheckpointSchema) {
      fail(ErrorKind::incompatible_checkpoint, "sidecar schema does not match");
    }
    checkpoint.config = train_config_from_json(sidecar.at("config"));
    checkpoint.iteration = sidecar.at("iteration").get<int>();
    checkpoint.rng_state = sidecar.value("rng_state", std::string{});
    checkpoint.reward_buffer = sidecar.at("reward_buffer").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::incompatible_checkpoint, std::string("checkpoint sidecar: ") + e.what());
  }
  if (!(checkpoint.config.net_config() == checkpoint.params.config())) {
    fail(ErrorKind::incompatible_checkpoint, "sidecar config does not match the stored network");
  }
  return checkpoint;
}

Trainer::Trainer(TrainConfig config)
    : config_(std::move(config)),
      buffers_(static_cast<std::size_t>(config_.buffer_capacity)),
      rng_(pack::derive_seed(config_.seed, 0x7a11)) {
  config_.validate();
  params_ = nn::ModelParams::initialize(config_.net_config(), pack::derive_seed(config_.seed, 0x1417));
  optimizer_ = nn::Adam(params_.values().size());
}

IterationMetrics Trainer::step() {
  const auto started = std::chrono::steady_clock::now();
  const int episodes = config_.episodes_per_iteration;
  const double threshold = buffers_.threshold(config_.percentile);
  const auto options = config_.pack_options();

  std::vector<Episode> played(static_cast<std::size_t>(episodes));
  std::vector<std::mt19937_64> rngs;
  for (int e = 0; e < episodes; ++e) {
    rngs.emplace_back(pack::derive_seed(pack::derive_seed(config_.seed, 0xe915 + iteration_), e));
  }
  parallel_for(played.size(), config_.threads, [&](std::size_t e) {
    const auto instance = training_instance(config_, iteration_, static_cast<int>(e));
    played[e] = play_episode(params_, instance, config_.search, options, threshold, rngs[e], false);
  });

  std::vector<nn::Sample> samples;  // D
  IterationMetrics m;
  m.iteration = iteration_;
  int optimal = 0;
  for (int e = 0; e < episodes; ++e) {
    auto& ep = played[e];
    buffers_.record(ep.reward);
    const double z = rank_against(ep.reward, threshold, rngs[e]);
    for (auto& s : ep.samples) {
      s.z = z;
      samples.push_back(std::move(s));
    }
    m.mean_reward += ep.reward;
    optimal += ep.optimal ? 1 : 0;
  }
  m.mean_reward /= episodes;
  for (const auto& ep : played) m.reward_std += (ep.reward - m.mean_reward) * (ep.reward - m.mean_reward);
  m.reward_std = std::sqrt(m.reward_std / episodes);
  m.optimality_ratio = static_cast<double>(optimal) / episodes;

  if (!samples.empty() && config_.train_steps > 0) {
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
    std::vector<const nn::Sample*> batch(static_cast<std::size_t>(config_.batch_size));
    std::vector<nn::Sample> augmented;
    double loss_sum = 0.0;
    for (int t = 0; t < config_.train_steps; ++t) {
      if (config_.augment) {
        augmented.clear();
        for (int i = 0; i < config_.batch_size; ++i) {
          const auto& d = config_.instances;
          augmented.push_back(augment_sample(samples[pick(rng_)], d.n_items, d.height, d.width, rng_));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = &augmented[i];
      } else {
        for (auto& b : batch) b = &samples[pick(rng_)];
      }
      const double loss = nn::train_step(params_, optimizer_, batch, config_.learning_rate,
                                         resolve_jobs(config_.threads), config_.l2);
      if (!std::isfinite(loss)) fail(ErrorKind::numeric, "non-finite training loss");
      loss_sum += loss;
    }
    m.loss = loss_sum / config_.train_steps;
  }
  samples.clear();
  buffers_.commit();
  ++iteration_;

  if (config_.record_wall_time) {
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  return m;
}

Checkpoint Trainer::checkpoint() const {
  std::ostringstream rng_state;
  rng_state << rng_;
  const auto& staged = buffers_.staging();
  return {params_, config_, iteration_, rng_state.str(), {staged.begin(), staged.end()}};
}

TrainResult run_training(const TrainConfig& config, const std::optional<std::filesystem::path>& run_dir,
                         const std::function<void(const IterationMetrics&)>& progress) {
  Trainer trainer(config);
  TrainResult result;
  std::string csv = metrics_csv_header();
  std::filesystem::path checkpoints;
  if (run_dir) {
    checkpoints = *run_dir / "checkpoints";
    std::filesystem::create_directories(checkpoints);
    io::write_json_atomic(*run_dir / "config.json", train_config_to_json(trainer.config()));
    io::write_text_atomic(*run_dir / "metrics.csv", csv);
  }
  auto write_checkpoint = [&] {
    if (!run_dir) return;
    char name[32];
    std::snprintf(name, sizeof name, "iter_%04d.bin", trainer.iteration());
    save_checkpoint(trainer.checkpoint(), checkpoints / name);
  };

  for (int k = 0; k < config.iterations; ++k) {
    IterationMetrics m;
    try {
      m = trainer.step();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::numeric) write_checkpoint();
      throw;
    }
    result.metrics.push_back(m);
    csv += metrics_csv_row(m);
    if (run_dir) {
      io::write_text_atomic(*run_dir / "metrics.csv", csv);
      const bool last = k + 1 == config.iterations;
      if (last || (config.checkpoint_every > 0 && trainer.iteration() % config.checkpoint_every == 0)) {
        write_checkpoint();
      }
    }
    if (progress) progress(m);
  }
  result.final = trainer.checkpoint();
  return result;
}

}  // namespace rudu::selfplay
