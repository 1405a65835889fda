#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "rudu/error.hpp"
#include "rudu/nn/net.hpp"
#include "rudu/pack/generator.hpp"
#include "rudu/pack/state.hpp"
#include "rudu/simd/kernels.hpp"

using namespace rudu;
using namespace rudu::nn;

namespace {

std::vector<double> random_input(const NetConfig& cfg, std::mt19937_64& rng) {
  std::vector<double> x(cfg.input_size());
  for (auto& v : x) v = std::bernoulli_distribution(0.4)(rng) ? 1.0 : 0.0;
  return x;
}

std::vector<std::uint8_t> random_mask(const NetConfig& cfg, std::mt19937_64& rng) {
  std::vector<std::uint8_t> m(cfg.action_space);
  for (auto& v : m) v = std::bernoulli_distribution(0.5)(rng);
  m[std::uniform_int_distribution<int>(0, cfg.action_space - 1)(rng)] = 1;
  return m;
}

Sample random_sample(const NetConfig& cfg, std::mt19937_64& rng) {
  Sample s;
  s.state = random_input(cfg, rng);
  s.mask = random_mask(cfg, rng);
  s.policy.assign(cfg.action_space, 0.0);
  double total = 0.0;
  for (int a = 0; a < cfg.action_space; ++a) {
    if (!s.mask[a]) continue;
    s.policy[a] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    total += s.policy[a];
  }
  for (auto& p : s.policy) p /= total;
  s.z = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  return s;
}

double sample_loss(const ModelParams& p, const Sample& s) {
  return loss(forward(p, s.state, s.mask), s.policy, s.z);
}

}  // namespace

TEST_CASE("forward: masked softmax") {
  const auto cfg = NetConfig::for_problem(3, 5, 5, 2, 4);
  const auto params = ModelParams::initialize(cfg, 3);
  std::mt19937_64 rng(3);
  const auto x = random_input(cfg, rng);

  std::vector<std::uint8_t> one(cfg.action_space, 0);
  one[7] = 1;
  const auto out = forward(params, x, one);
  CHECK(out.policy[7] == 1.0);
  for (int a = 0; a < cfg.action_space; ++a)
    if (a != 7) CHECK(out.policy[a] == 0.0);

  // Zeroed policy weights give equal logits.
  auto flat = params;
  for (auto& v : flat.tensor("policy.weight")) v = 0.0;
  for (auto& v : flat.tensor("policy.bias")) v = 0.0;
  std::vector<std::uint8_t> two(cfg.action_space, 0);
  two[2] = two[11] = 1;
  const auto even = forward(flat, x, two);
  CHECK(even.policy[2] == doctest::Approx(0.5));
  CHECK(even.policy[11] == doctest::Approx(0.5));
}

TEST_CASE("forward: finite and normalized over random draws") {
  const auto cfg = NetConfig::for_problem(4, 6, 6, 2, 6);
  std::mt19937_64 rng(11);
  for (int draw = 0; draw < 1000; ++draw) {
    const auto params = ModelParams::initialize(cfg, rng());
    const auto out = forward(params, random_input(cfg, rng), random_mask(cfg, rng));
    double total = 0.0;
    for (double p : out.policy) {
      REQUIRE(std::isfinite(p));
      total += p;
    }
    REQUIRE(std::abs(total - 1.0) <= 1e-6);
    REQUIRE(std::isfinite(out.value));
    REQUIRE(std::abs(out.value) <= 1.0);
  }
}

TEST_CASE("forward is deterministic and isa-independent within rounding") {
  const auto cfg = NetConfig::for_problem(5, 8, 8, 3, 16);
  const auto params = ModelParams::initialize(cfg, 5);
  std::mt19937_64 rng(5);
  const auto x = random_input(cfg, rng);
  const auto m = random_mask(cfg, rng);
  const auto a = forward(params, x, m);
  const auto b = forward(params, x, m);
  CHECK(a.policy == b.policy);
  CHECK(a.value == b.value);

  const auto before = simd::active_isa();
  simd::set_active_isa(simd::Isa::scalar);
  const auto s = forward(params, x, m);
  simd::set_active_isa(before);
  for (std::size_t i = 0; i < s.policy.size(); ++i) CHECK(s.policy[i] == doctest::Approx(a.policy[i]).epsilon(1e-10));
  CHECK(s.value == doctest::Approx(a.value).epsilon(1e-10));
}

TEST_CASE("loss values") {
  NetOutput out{{0.25, 0.75, 0.0}, 0.3};
  const std::vector<double> target{0.25, 0.75, 0.0};
  const double entropy = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  CHECK(loss(out, target, 0.3) == doctest::Approx(entropy));

  NetOutput half{{0.5, 0.5}, 1.0};
  CHECK(loss(half, std::vector<double>{1.0, 0.0}, 1.0) == doctest::Approx(0.6931).epsilon(1e-4));

  NetOutput wrong{{0.5, 0.5}, -1.0};
  const std::vector<double> uniform{0.5, 0.5};
  CHECK(loss(wrong, uniform, 1.0) - loss(NetOutput{{0.5, 0.5}, 1.0}, uniform, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("analytic gradient matches central differences") {
  const auto cfg = NetConfig::for_problem(3, 5, 5, 2, 8);
  std::mt19937_64 rng(21);
  auto params = ModelParams::initialize(cfg, 21);
  // Nonzero biases keep pre-activations away from the ReLU kink.
  for (const auto& t : params.tensors())
    if (t.name.ends_with(".bias"))
      for (auto& v : params.tensor(t.name)) v = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);

  const double eps = 1e-6;
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    const auto sample = random_sample(cfg, rng);
    std::vector<double> grad(params.values().size(), 0.0);
    loss_and_gradient(params, sample, grad);
    auto values = params.values();
    for (std::size_t i = 0; i < values.size(); i += 3) {
      const double keep = values[i];
      values[i] = keep + eps;
      const double up = sample_loss(params, sample);
      values[i] = keep - eps;
      const double down = sample_loss(params, sample);
      values[i] = keep;
      const double numeric = (up - down) / (2 * eps);
      const double rel = std::abs(numeric - grad[i]) / std::max({std::abs(numeric), std::abs(grad[i]), 1e-8});
      if (std::abs(numeric - grad[i]) > 1e-9) worst = std::max(worst, rel);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("train_step") {
  const auto cfg = NetConfig::for_problem(3, 5, 5, 2, 8);
  std::mt19937_64 rng(8);
  auto params = ModelParams::initialize(cfg, 8);
  const auto sample = random_sample(cfg, rng);
  const Sample* batch[] = {&sample};

  SUBCASE("zero learning rate leaves parameters unchanged") {
    Adam adam(params.values().size());
    const auto before = params;
    train_step(params, adam, batch, 0.0);
    CHECK(std::equal(before.values().begin(), before.values().end(), params.values().begin()));
  }

  SUBCASE("overfitting one sample approaches the entropy floor") {
    Adam adam(params.values().size());
    double entropy = 0.0;
    for (double p : sample.policy)
      if (p > 0) entropy -= p * std::log(p);
    const double first = sample_loss(params, sample);
    double previous = first;
    int increases = 0;
    for (int i = 0; i < 300; ++i) {
      train_step(params, adam, batch, 1e-3);
      const double now = sample_loss(params, sample);
      if (now > previous + 1e-9) ++increases;
      previous = now;
    }
    CHECK(previous < first);
    CHECK(previous - entropy < 0.05);
    CHECK(increases < 30);
  }

  SUBCASE("thread count does not change the update") {
    std::vector<Sample> many;
    for (int i = 0; i < 20; ++i) many.push_back(random_sample(cfg, rng));
    std::vector<const Sample*> ptrs;
    for (const auto& s : many) ptrs.push_back(&s);
    auto p1 = params;
    auto p4 = params;
    Adam a1(params.values().size());
    Adam a4(params.values().size());
    const double l1 = train_step(p1, a1, ptrs, 1e-3, 1);
    const double l4 = train_step(p4, a4, ptrs, 1e-3, 4);
    CHECK(l1 == l4);
    CHECK(std::equal(p1.values().begin(), p1.values().end(), p4.values().begin()));
  }

  SUBCASE("non-finite gradient is rejected before any update") {
    Adam adam(params.values().size());
    auto bad = sample;
    bad.z = std::nan("");
    const Sample* b[] = {&bad};
    const auto before = params;
    CHECK_THROWS_AS(train_step(params, adam, b, 1e-3), Error);
    CHECK(std::equal(before.values().begin(), before.values().end(), params.values().begin()));
  }
}

TEST_CASE("checkpoint round trip") {
  const auto cfg = NetConfig::for_problem(5, 8, 8, 3, 8);
  auto params = ModelParams::initialize(cfg, 4);
  params.version = 12;
  const auto dir = std::filesystem::temp_directory_path() / "rudu_nn_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "net.bin";
  save_params(params, path);
  const auto loaded = load_params(path);
  CHECK(loaded == params);

  std::mt19937_64 rng(4);
  const auto x = random_input(cfg, rng);
  const auto m = random_mask(cfg, rng);
  CHECK(forward(params, x, m).policy == forward(loaded, x, m).policy);

  try {
    load_params(dir / "missing.bin");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_file);
  }
  {
    std::ofstream junk(dir / "junk.bin", std::ios::binary);
    junk << "not a network";
  }
  try {
    load_params(dir / "junk.bin");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::incompatible_checkpoint);
  }
  std::filesystem::remove_all(dir);
}
