#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rudu/pack/instance.hpp"

namespace rudu::oran {

inline constexpr int kHours = 24;
inline constexpr int kPeakHour = 17;

struct Position {
  double x_km = 0.0;
  double y_km = 0.0;
};

double distance_km(const Position& a, const Position& b);

/// A radio site (RU). `load_curve` holds the hourly mean CPU requirement;
/// `mu_cpu` is the peak-hour mean and requests spread +/- `delta_cpu`.
struct Site {
  int id = 0;
  Position position;
  double mu_cpu = 1.0;
  double delta_cpu = 0.0;
  std::array<double, kHours> load_curve{};

  /// Mean CPU requirement at `hour`; the peak value when no curve is set.
  double mean_at(int hour) const;
  void validate() const;
};

/// An edge site hosting a DU.
struct DUSite {
  int id = 0;
  Position position;
  int capacity = 15;  // resource rows, the virtual height H'
  int t_max = 8;      // longest processing time T'
  int w_star = 15;    // latency budget in time units
  std::vector<int> connected_rus;
};

struct LatencyModel {
  double reduction_factor = 2.5;
  double speed_of_light = 299792458.0;  // m/s
  double bound_s = 100e-6;
};

/// t = F * d / c, with d given in kilometres.
double fronthaul_latency(double d_km, const LatencyModel& model = {});

struct ConnectionReport {
  DUSite du;
  std::vector<int> violators;  // selected sites over the latency bound
};

/// Connects the k nearest sites (ties by id) and flags any selected link
/// that breaks the fronthaul bound.
ConnectionReport connect_rus(const DUSite& du, const std::vector<Site>& sites, int k = 10,
                             const LatencyModel& model = {});

/// One item per connected RU: h ~ U{round(mu_h - delta), round(mu_h + delta)}
/// clamped to [1, capacity], w ~ U{1, T'}.
pack::Instance sample_requests(const DUSite& du, const std::vector<Site>& sites, int hour,
                               std::uint64_t seed);

struct RegionConfig {
  int n_sites = 100;
  int n_dus = 10;
  double extent_x_km = 14.0;
  double extent_y_km = 13.0;
  double peak_mu_min = 2.5;
  double peak_mu_max = 4.5;
  double delta = 1.0;
  int capacity = 15;
  int t_max = 8;
  int w_star = 15;
  int rus_per_du = 10;
};

struct Region {
  RegionConfig config;
  std::uint64_t seed = 0;
  std::vector<Site> sites;
  std::vector<DUSite> dus;

  const DUSite& du(int id) const;
};

/// Uniform site and DU positions, daily load curves peaking at 17:00 with a
/// 21:00-04:00 trough; DUs are connected to their nearest RUs.
Region generate_synthetic_region(const RegionConfig& config, std::uint64_t seed);

/// Normalized daily load shape in (0, 1], equal to 1 at the peak hour.
double daily_profile(int hour);

}  // namespace rudu::oran
