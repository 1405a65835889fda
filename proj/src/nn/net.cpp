#include "rudu/nn/net.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "rudu/error.hpp"
#include "rudu/simd/kernels.hpp"

namespace rudu::nn {

namespace {

constexpr int kKernel = 3;
constexpr int kTaps = kKernel * kKernel;
constexpr double kProbFloor = 1e-12;
constexpr int kGradientShards = 8;

std::string conv_name(int layer, const char* part) {
  return "conv" + std::to_string(layer) + "." + part;
}

// col[(c * 9 + ky * 3 + kx) * P + y * W + x] = in[c, y + ky - 1, x + kx - 1]
void im2col(const double* in, int channels, int height, int width, double* col) {
  const int plane = height * width;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < kKernel; ++ky) {
      for (int kx = 0; kx < kKernel; ++kx) {
        double* dst = col + static_cast<std::size_t>(c * kTaps + ky * kKernel + kx) * plane;
        for (int y = 0; y < height; ++y) {
          const int sy = y + ky - 1;
          for (int x = 0; x < width; ++x) {
            const int sx = x + kx - 1;
            const bool inside = sy >= 0 && sy < height && sx >= 0 && sx < width;
            dst[y * width + x] = inside ? in[static_cast<std::size_t>(c) * plane + sy * width + sx] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* col, int channels, int height, int width, double* out) {
  const int plane = height * width;
  std::fill_n(out, static_cast<std::size_t>(channels) * plane, 0.0);
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < kKernel; ++ky) {
      for (int kx = 0; kx < kKernel; ++kx) {
        const double* src = col + static_cast<std::size_t>(c * kTaps + ky * kKernel + kx) * plane;
        for (int y = 0; y < height; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= height) continue;
          for (int x = 0; x < width; ++x) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= width) continue;
            out[static_cast<std::size_t>(c) * plane + sy * width + sx] += src[y * width + x];
          }
        }
      }
    }
  }
}

// Forward activations kept for the backward pass.
struct Trace {
  std::vector<std::vector<double>> cols;   // per layer, (Cin * 9) x P
  std::vector<std::vector<double>> acts;   // per layer, Cout x P after ReLU
  std::vector<int> legal;
  std::vector<double> probs;               // over legal actions
  double value = 0.0;
};

void run_forward(const ModelParams& params, std::span<const double> input,
                 std::span<const std::uint8_t> mask, Trace& trace) {
  const NetConfig& cfg = params.config();
  require(input.size() == cfg.input_size(), "state tensor has the wrong shape");
  require(mask.size() == static_cast<std::size_t>(cfg.action_space), "mask has the wrong length");

  const auto& k = simd::active_kernels();
  const int plane = cfg.height * cfg.width;
  trace.cols.resize(cfg.conv_layers);
  trace.acts.resize(cfg.conv_layers);

  const double* layer_in = input.data();
  int in_channels = cfg.input_planes;
  for (int l = 0; l < cfg.conv_layers; ++l) {
    auto& col = trace.cols[l];
    auto& act = trace.acts[l];
    col.resize(static_cast<std::size_t>(in_channels) * kTaps * plane);
    act.resize(static_cast<std::size_t>(cfg.channels) * plane);
    im2col(layer_in, in_channels, cfg.height, cfg.width, col.data());

    const auto weight = params.tensor(conv_name(l, "weight"));
    const auto bias = params.tensor(conv_name(l, "bias"));
    const int taps = in_channels * kTaps;
    for (int co = 0; co < cfg.channels; ++co) {
      double* out = act.data() + static_cast<std::size_t>(co) * plane;
      std::fill_n(out, plane, bias[co]);
      const double* wrow = weight.data() + static_cast<std::size_t>(co) * taps;
      for (int t = 0; t < taps; ++t) {
        k.axpy(wrow[t], col.data() + static_cast<std::size_t>(t) * plane, out, plane);
      }
      for (int p = 0; p < plane; ++p) out[p] = std::max(out[p], 0.0);
    }
    layer_in = act.data();
    in_channels = cfg.channels;
  }

  const auto& features = trace.acts.back();
  const std::size_t feat_size = features.size();

  trace.legal.clear();
  for (int a = 0; a < cfg.action_space; ++a) {
    if (mask[a]) trace.legal.push_back(a);
  }
  require(!trace.legal.empty(), "mask has no legal action");

  const auto pw = params.tensor("policy.weight");
  const auto pb = params.tensor("policy.bias");
  trace.probs.resize(trace.legal.size());
  double top = -INFINITY;
  for (std::size_t i = 0; i < trace.legal.size(); ++i) {
    const int a = trace.legal[i];
    trace.probs[i] = k.dot(pw.data() + static_cast<std::size_t>(a) * feat_size, features.data(), feat_size) + pb[a];
    top = std::max(top, trace.probs[i]);
  }
  double total = 0.0;
  for (auto& p : trace.probs) {
    p = std::exp(p - top);
    total += p;
  }
  for (auto& p : trace.probs) p /= total;

  const auto vw = params.tensor("value.weight");
  const auto vb = params.tensor("value.bias");
  trace.value = std::tanh(k.dot(vw.data(), features.data(), feat_size) + vb[0]);
}

NetOutput to_output(const NetConfig& cfg, const Trace& trace) {
  NetOutput out;
  out.policy.assign(static_cast<std::size_t>(cfg.action_space), 0.0);
  for (std::size_t i = 0; i < trace.legal.size(); ++i) out.policy[trace.legal[i]] = trace.probs[i];
  out.value = trace.value;
  return out;
}

}  // namespace

NetConfig NetConfig::for_problem(int n_items, int height, int width, int conv_layers,
                                 int channels) {
  NetConfig cfg;
  cfg.input_planes = n_items + 1;
  cfg.height = height;
  cfg.width = width;
  cfg.conv_layers = conv_layers;
  cfg.channels = channels;
  cfg.action_space = n_items * width;
  return cfg;
}

void NetConfig::validate() const {
  require(input_planes >= 2, "net needs at least one item plane");
  require(height >= 1 && width >= 1, "net grid must be non-empty");
  require(conv_layers >= 1, "net needs at least one conv layer");
  require(channels >= 1, "net needs at least one channel");
  require(action_space == item_count() * width, "action space must equal N * W'");
}

ModelParams::ModelParams(const NetConfig& config) : config_(config) {
  config_.validate();
  const int taps0 = config.input_planes * kTaps;
  const int taps = config.channels * kTaps;
  const int features = config.channels * config.height * config.width;
  for (int l = 0; l < config.conv_layers; ++l) {
    add(conv_name(l, "weight"), {config.channels, l == 0 ? taps0 : taps});
    add(conv_name(l, "bias"), {config.channels});
  }
  add("policy.weight", {config.action_space, features});
  add("policy.bias", {config.action_space});
  add("value.weight", {1, features});
  add("value.bias", {1});
  data_.assign(tensors_.empty() ? 0 : tensors_.back().offset + tensors_.back().size, 0.0);
}

void ModelParams::add(std::string name, std::vector<int> shape) {
  std::size_t size = 1;
  for (int d : shape) size *= static_cast<std::size_t>(d);
  const std::size_t offset = tensors_.empty() ? 0 : tensors_.back().offset + tensors_.back().size;
  tensors_.push_back({std::move(name), std::move(shape), offset, size});
}

ModelParams ModelParams::initialize(const NetConfig& config, std::uint64_t seed) {
  ModelParams params(config);
  std::mt19937_64 rng(seed);
  for (const auto& t : params.tensors_) {
    if (t.shape.size() < 2) continue;  // biases stay zero
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.shape[1]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < t.size; ++i) params.data_[t.offset + i] = dist(rng);
  }
  return params;
}

const TensorInfo& ModelParams::info(std::string_view name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  fail(ErrorKind::invalid_argument, "unknown tensor: " + std::string(name));
}

std::span<double> ModelParams::tensor(std::string_view name) {
  const auto& t = info(name);
  return std::span<double>(data_).subspan(t.offset, t.size);
}

std::span<const double> ModelParams::tensor(std::string_view name) const {
  const auto& t = info(name);
  return std::span<const double>(data_).subspan(t.offset, t.size);
}

NetOutput forward(const ModelParams& params, std::span<const double> input,
                  std::span<const std::uint8_t> mask) {
  thread_local Trace trace;
  run_forward(params, input, mask, trace);
  return to_output(params.config(), trace);
}

double loss(const NetOutput& output, std::span<const double> target_policy, double z) {
  require(target_policy.size() == output.policy.size(), "target policy has the wrong length");
  const double dv = output.value - z;
  double cross_entropy = 0.0;
  for (std::size_t a = 0; a < target_policy.size(); ++a) {
    if (target_policy[a] != 0.0) {
      cross_entropy -= target_policy[a] * std::log(std::max(output.policy[a], kProbFloor));
    }
  }
  return dv * dv + cross_entropy;
}

double loss_and_gradient(const ModelParams& params, const Sample& sample, std::span<double> grad) {
  const NetConfig& cfg = params.config();
  require(grad.size() == params.values().size(), "gradient buffer has the wrong size");

  thread_local Trace trace;
  run_forward(params, sample.state, sample.mask, trace);
  const auto& k = simd::active_kernels();

  // loss
  double cross_entropy = 0.0;
  double weighted = 0.0;  // sum_a p_a * g_a with g_a = dloss/dp_a
  std::vector<double> g(trace.legal.size(), 0.0);
  for (std::size_t i = 0; i < trace.legal.size(); ++i) {
    const double target = sample.policy[trace.legal[i]];
    if (target == 0.0) continue;
    const double p = trace.probs[i];
    cross_entropy -= target * std::log(std::max(p, kProbFloor));
    if (p > kProbFloor) {
      g[i] = -target / p;
      weighted += p * g[i];
    }
  }
  const double dv = trace.value - sample.z;
  const double total = dv * dv + cross_entropy;

  const auto& features = trace.acts.back();
  const std::size_t feat_size = features.size();
  std::vector<double> dfeat(feat_size, 0.0);

  auto grad_of = [&](std::string_view name) {
    const auto& t = params.info(name);
    return grad.subspan(t.offset, t.size);
  };

  // policy head
  {
    const auto pw = params.tensor("policy.weight");
    auto dpw = grad_of("policy.weight");
    auto dpb = grad_of("policy.bias");
    for (std::size_t i = 0; i < trace.legal.size(); ++i) {
      const int a = trace.legal[i];
      const double dlogit = trace.probs[i] * (g[i] - weighted);
      if (dlogit == 0.0) continue;
      const std::size_t row = static_cast<std::size_t>(a) * feat_size;
      k.axpy(dlogit, features.data(), dpw.data() + row, feat_size);
      dpb[a] += dlogit;
      k.axpy(dlogit, pw.data() + row, dfeat.data(), feat_size);
    }
  }

  // value head
  {
    const double dpre = 2.0 * dv * (1.0 - trace.value * trace.value);
    const auto vw = params.tensor("value.weight");
    k.axpy(dpre, features.data(), grad_of("value.weight").data(), feat_size);
    grad_of("value.bias")[0] += dpre;
    k.axpy(dpre, vw.data(), dfeat.data(), feat_size);
  }

  // conv stack
  const int plane = cfg.height * cfg.width;
  std::vector<double> dact = std::move(dfeat);
  std::vector<double> dcol;
  for (int l = cfg.conv_layers - 1; l >= 0; --l) {
    const int in_channels = l == 0 ? cfg.input_planes : cfg.channels;
    const int taps = in_channels * kTaps;
    const auto& act = trace.acts[l];
    const auto& col = trace.cols[l];
    const auto weight = params.tensor(conv_name(l, "weight"));
    auto dw = grad_of(conv_name(l, "weight"));
    auto db = grad_of(conv_name(l, "bias"));

    for (std::size_t i = 0; i < dact.size(); ++i) {
      if (act[i] <= 0.0) dact[i] = 0.0;
    }
    if (l > 0) dcol.assign(static_cast<std::size_t>(taps) * plane, 0.0);
    for (int co = 0; co < cfg.channels; ++co) {
      const double* drow = dact.data() + static_cast<std::size_t>(co) * plane;
      double bias_grad = 0.0;
      for (int p = 0; p < plane; ++p) bias_grad += drow[p];
      db[co] += bias_grad;
      double* dwrow = dw.data() + static_cast<std::size_t>(co) * taps;
      const double* wrow = weight.data() + static_cast<std::size_t>(co) * taps;
      for (int t = 0; t < taps; ++t) {
        const double* crow = col.data() + static_cast<std::size_t>(t) * plane;
        dwrow[t] += k.dot(drow, crow, plane);
        if (l > 0) k.axpy(wrow[t], drow, dcol.data() + static_cast<std::size_t>(t) * plane, plane);
      }
    }
    if (l > 0) {
      std::vector<double> below(static_cast<std::size_t>(in_channels) * plane);
      col2im(dcol.data(), in_channels, cfg.height, cfg.width, below.data());
      dact = std::move(below);
    }
  }
  return total;
}

Adam::Adam(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void Adam::apply(std::span<double> params, std::span<const double> grad, double learning_rate) {
  require(params.size() == m_.size() && grad.size() == m_.size(), "optimizer size mismatch");
  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
    const double step = learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.epsilon);
    params[i] -= step;
  }
}

double train_step(ModelParams& params, Adam& optimizer, std::span<const Sample* const> batch,
                  double learning_rate, int threads, double l2) {
  require(!batch.empty(), "minibatch is empty");
  const std::size_t n = params.values().size();
  const int shards = static_cast<int>(std::min<std::size_t>(kGradientShards, batch.size()));

  std::vector<std::vector<double>> shard_grad(shards, std::vector<double>(n, 0.0));
  std::vector<double> shard_loss(shards, 0.0);
  auto run_shard = [&](int s) {
    for (std::size_t i = s; i < batch.size(); i += shards) {
      shard_loss[s] += loss_and_gradient(params, *batch[i], shard_grad[s]);
    }
  };

  const int workers = std::clamp(threads, 1, shards);
  if (workers == 1) {
    for (int s = 0; s < shards; ++s) run_shard(s);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int s = w; s < shards; s += workers) run_shard(s);
      });
    }
  }

  std::vector<double> grad(n, 0.0);
  double total = 0.0;
  for (int s = 0; s < shards; ++s) {
    simd::scalar::axpy(1.0, shard_grad[s].data(), grad.data(), n);
    total += shard_loss[s];
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  double mean_loss = total * scale;
  auto values = params.values();
  for (std::size_t i = 0; i < n; ++i) grad[i] *= scale;
  if (l2 > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      mean_loss += l2 * values[i] * values[i];
      grad[i] += 2.0 * l2 * values[i];
    }
  }
  for (double g : grad) {
    if (!std::isfinite(g)) fail(ErrorKind::numeric, "non-finite gradient; step aborted");
  }
  optimizer.apply(values, grad, learning_rate);
  ++params.version;
  return mean_loss;
}

}  // namespace rudu::nn
