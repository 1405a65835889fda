#include "rudu/oran/report.hpp"

#include <cstdio>

#include "rudu/error.hpp"
#include "rudu/pack/generator.hpp"

namespace rudu::oran {

std::uint64_t scenario_sample_seed(std::uint64_t seed, int du, int index) {
  return pack::derive_seed(pack::derive_seed(seed, static_cast<std::uint64_t>(du)), static_cast<std::uint64_t>(index));
}

std::vector<pack::Instance> sample_du_instances(const Region& region, int du, int hour, int samples,
                                                std::uint64_t seed) {
  require(samples >= 0, "samples must be >= 0");
  const DUSite& site = region.du(du);
  std::vector<pack::Instance> out;
  for (int i = 0; i < samples; ++i) {
    auto instance = sample_requests(site, region.sites, hour, scenario_sample_seed(seed, du, i));
    instance.validate(site.capacity);
    out.push_back(std::move(instance));
  }
  return out;
}

ScenarioReport run_scenario(const Region& region, const ScenarioRequest& request) {
  require(!request.dus.empty(), "choose at least one DU");
  require(!request.solvers.empty(), "choose at least one solver");
  ScenarioReport report;
  report.hour = request.hour;
  report.seed = request.seed;
  report.samples = request.samples;
  for (int du : request.dus) {
    const auto instances = sample_du_instances(region, du, request.hour, request.samples, request.seed);
    for (auto setup : request.solvers) {
      setup.options.height = region.du(du).capacity;
      const auto eval = selfplay::evaluate(setup, instances, {.use_oracle = false, .jobs = request.jobs});
      report.rows.push_back({du, eval.solver, eval.mean_reward, eval.reward_std, eval.mean_utilization,
                             eval.dead_count, static_cast<int>(instances.size())});
    }
  }
  return report;
}

nlohmann::json scenario_report_to_json(const ScenarioReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"du", r.du},
                    {"solver", r.solver},
                    {"mean_reward", r.mean_reward},
                    {"reward_std", r.reward_std},
                    {"mean_utilization", r.mean_utilization},
                    {"dead", r.dead},
                    {"instances", r.instances}});
  }
  return {{"hour", report.hour}, {"seed", report.seed}, {"samples", report.samples}, {"rows", std::move(rows)}};
}

std::string scenario_report_table(const ScenarioReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %-10s %8s %8s %8s %5s\n", "DU", "solver", "r_mean", "r_std", "U_mean",
                "dead");
  out += line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-6d %-10s %8.3f %8.3f %8.3f %5d\n", r.du, r.solver.c_str(), r.mean_reward,
                  r.reward_std, r.mean_utilization, r.dead);
    out += line;
  }
  return out;
}

}  // namespace rudu::oran
