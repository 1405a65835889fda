#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rudu::nn {

/// Shape of the two-headed network. A stack of 3x3 same-padded ReLU
/// convolutions feeds a masked-softmax policy head over item x column
/// actions and a tanh value head.
struct NetConfig {
  int input_planes = 0;  // N + 1
  int height = 0;        // H'
  int width = 0;         // W'
  int conv_layers = 3;
  int channels = 32;
  int action_space = 0;  // N * W'

  static NetConfig for_problem(int n_items, int height, int width, int conv_layers = 3,
                               int channels = 32);
  int item_count() const { return input_planes - 1; }
  std::size_t input_size() const {
    return static_cast<std::size_t>(input_planes) * height * width;
  }
  void validate() const;

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

struct TensorInfo {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;

  friend bool operator==(const TensorInfo&, const TensorInfo&) = default;
};

/// Flat parameter vector with named sub-tensors.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(const NetConfig& config);  // zero-filled

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  static ModelParams initialize(const NetConfig& config, std::uint64_t seed);

  const NetConfig& config() const { return config_; }
  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  const TensorInfo& info(std::string_view name) const;

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> tensor(std::string_view name);
  std::span<const double> tensor(std::string_view name) const;

  std::uint64_t version = 0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  void add(std::string name, std::vector<int> shape);

  NetConfig config_;
  std::vector<TensorInfo> tensors_;
  std::vector<double> data_;
};

struct NetOutput {
  std::vector<double> policy;  // zero on masked actions
  double value = 0.0;
};

/// One supervised target produced by search.
struct Sample {
  std::vector<double> state;
  std::vector<std::uint8_t> mask;
  std::vector<double> policy;
  double z = 0.0;
};

NetOutput forward(const ModelParams& params, std::span<const double> input,
                  std::span<const std::uint8_t> mask);

/// (v - z)^2 - sum_a target(a) log max(p(a), 1e-12)
double loss(const NetOutput& output, std::span<const double> target_policy, double z);

/// Loss for one sample; adds dloss/dtheta into `grad`.
double loss_and_gradient(const ModelParams& params, const Sample& sample,
                         std::span<double> grad);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t parameter_count, AdamConfig config = {});

  void apply(std::span<double> params, std::span<const double> grad, double learning_rate);
  long long steps() const { return steps_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long long steps_ = 0;
};

/// One optimizer update on the mean minibatch loss. Returns the pre-update
/// mean loss. Gradients are accumulated in fixed shards, so results do not
/// depend on `threads`. Throws rudu::Error(numeric) on a non-finite gradient
/// and leaves the parameters untouched.
double train_step(ModelParams& params, Adam& optimizer, std::span<const Sample* const> batch,
                  double learning_rate, int threads = 1, double l2 = 0.0);

inline constexpr std::uint32_t kCheckpointSchema = 1;

void save_params(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace rudu::nn
