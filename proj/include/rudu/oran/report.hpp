#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rudu/oran/scenario.hpp"
#include "rudu/selfplay/evaluate.hpp"

namespace rudu::oran {

struct ScenarioRequest {
  int hour = kPeakHour;
  std::vector<int> dus;
  int samples = 10;
  std::uint64_t seed = 0;
  std::vector<selfplay::SolverSetup> solvers;
  int jobs = 1;
};

struct ScenarioRow {
  int du = 0;
  std::string solver;
  double mean_reward = 0.0;
  double reward_std = 0.0;
  double mean_utilization = 0.0;
  int dead = 0;
  int instances = 0;
};

struct ScenarioReport {
  int hour = 0;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<ScenarioRow> rows;  // DU-major, solvers in request order
};

/// Seed of sample `index` for DU `du`.
std::uint64_t scenario_sample_seed(std::uint64_t seed, int du, int index);

/// Request batches for one DU at `hour`. Every instance is validated
/// against the DU capacity before it is returned.
std::vector<pack::Instance> sample_du_instances(const Region& region, int du, int hour, int samples,
                                                std::uint64_t seed);

ScenarioReport run_scenario(const Region& region, const ScenarioRequest& request);

nlohmann::json scenario_report_to_json(const ScenarioReport& report);
/// Fixed-width text table: DU, solver, mean reward, std, mean utilization.
std::string scenario_report_table(const ScenarioReport& report);

}  // namespace rudu::oran
