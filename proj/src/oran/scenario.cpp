#include "rudu/oran/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "rudu/error.hpp"

namespace rudu::oran {

double distance_km(const Position& a, const Position& b) {
  return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

double Site::mean_at(int hour) const {
  require(hour >= 0 && hour < kHours, "hour must be in [0, 24)");
  const bool has_curve = std::any_of(load_curve.begin(), load_curve.end(), [](double v) { return v > 0.0; });
  return has_curve ? load_curve[hour] : mu_cpu;
}

void Site::validate() const {
  require(mu_cpu > 0.0, "site " + std::to_string(id) + ": mu_cpu must be > 0");
  require(delta_cpu >= 0.0, "site " + std::to_string(id) + ": delta_cpu must be >= 0");
  require(mu_cpu - delta_cpu >= 1.0, "site " + std::to_string(id) + ": mu_cpu - delta_cpu must be >= 1");
}

double fronthaul_latency(double d_km, const LatencyModel& model) {
  require(d_km >= 0.0, "distance must be >= 0");
  return model.reduction_factor * (d_km * 1000.0) / model.speed_of_light;
}

ConnectionReport connect_rus(const DUSite& du, const std::vector<Site>& sites, int k,
                             const LatencyModel& model) {
  require(k >= 1, "k must be >= 1");
  if (static_cast<int>(sites.size()) < k) {
    fail(ErrorKind::invalid_argument, "need at least " + std::to_string(k) + " sites to connect");
  }
  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = distance_km(du.position, sites[a].position);
    const double db = distance_km(du.position, sites[b].position);
    if (da != db) return da < db;
    return sites[a].id < sites[b].id;
  });

  ConnectionReport report{du, {}};
  report.du.connected_rus.clear();
  for (int i = 0; i < k; ++i) {
    const Site& site = sites[order[i]];
    report.du.connected_rus.push_back(site.id);
    if (fronthaul_latency(distance_km(du.position, site.position), model) > model.bound_s) {
      report.violators.push_back(site.id);
    }
  }
  if (!report.violators.empty()) {
    std::clog << "warning: DU " << du.id << " fronthaul latency bound exceeded for sites";
    for (int id : report.violators) std::clog << ' ' << id;
    std::clog << '\n';
  }
  return report;
}

pack::Instance sample_requests(const DUSite& du, const std::vector<Site>& sites, int hour,
                               std::uint64_t seed) {
  require(hour >= 0 && hour < kHours, "hour must be in [0, 24)");
  require(!du.connected_rus.empty(), "DU has no connected RUs");
  require(du.t_max >= 1 && du.t_max <= du.w_star, "T' must be in [1, W*]");
  require(du.capacity >= 1, "DU capacity must be >= 1");

  std::mt19937_64 rng(seed);
  pack::Instance instance;
  instance.w_star = du.w_star;
  instance.seed = seed;
  for (int ru : du.connected_rus) {
    const auto it = std::find_if(sites.begin(), sites.end(), [ru](const Site& s) { return s.id == ru; });
    require(it != sites.end(), "connected RU " + std::to_string(ru) + " is not a known site");
    const double mu = it->mean_at(hour);
    const int hi_raw = static_cast<int>(std::llround(mu + it->delta_cpu));
    const int lo = std::clamp(static_cast<int>(std::llround(mu - it->delta_cpu)), 1, du.capacity);
    const int hi = std::clamp(hi_raw, lo, du.capacity);
    const int h = std::uniform_int_distribution<int>(lo, hi)(rng);
    const int w = std::uniform_int_distribution<int>(1, du.t_max)(rng);
    instance.items.push_back({instance.size(), w, h});
  }
  return instance;
}

double daily_profile(int hour) {
  static constexpr std::array<double, kHours> kShape{
      0.25, 0.24, 0.23, 0.22, 0.23, 0.30,  // 00-05
      0.38, 0.48, 0.58, 0.64, 0.68, 0.72,  // 06-11
      0.76, 0.78, 0.80, 0.84, 0.92, 1.00,  // 12-17
      0.90, 0.72, 0.52, 0.36, 0.30, 0.27,  // 18-23
  };
  return kShape.at(static_cast<std::size_t>(hour));
}

const DUSite& Region::du(int id) const {
  for (const auto& d : dus) {
    if (d.id == id) return d;
  }
  fail(ErrorKind::invalid_argument, "unknown DU id " + std::to_string(id));
}

Region generate_synthetic_region(const RegionConfig& config, std::uint64_t seed) {
  require(config.n_sites >= config.rus_per_du && config.n_sites >= 10, "need at least 10 sites");
  require(config.n_dus >= 1, "need at least one DU");
  require(config.peak_mu_min - config.delta >= 1.0, "peak mu - delta must be >= 1");
  require(config.peak_mu_max >= config.peak_mu_min, "peak mu range is empty");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, config.extent_x_km);
  std::uniform_real_distribution<double> uy(0.0, config.extent_y_km);
  std::uniform_real_distribution<double> peak(config.peak_mu_min, config.peak_mu_max);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);

  Region region;
  region.config = config;
  region.seed = seed;
  for (int i = 0; i < config.n_sites; ++i) {
    Site site;
    site.id = i;
    site.position = {ux(rng), uy(rng)};
    site.mu_cpu = peak(rng);
    site.delta_cpu = config.delta;
    for (int h = 0; h < kHours; ++h) {
      double scale = daily_profile(h);
      // the peak hour stays exactly at the peak; every other hour stays below it
      if (h != kPeakHour) scale = std::min(scale * (1.0 + jitter(rng)), 0.98);
      site.load_curve[h] = site.mu_cpu * scale;
    }
    region.sites.push_back(site);
  }
  for (int j = 0; j < config.n_dus; ++j) {
    DUSite du;
    du.id = j;
    du.position = {ux(rng), uy(rng)};
    du.capacity = config.capacity;
    du.t_max = config.t_max;
    du.w_star = config.w_star;
    region.dus.push_back(connect_rus(du, region.sites, config.rus_per_du).du);
  }
  return region;
}

}  // namespace rudu::oran
