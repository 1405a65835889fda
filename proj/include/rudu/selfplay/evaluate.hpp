#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rudu/mcts/search.hpp"
#include "rudu/nn/net.hpp"
#include "rudu/oracle/exact.hpp"
#include "rudu/pack/state.hpp"

namespace rudu::selfplay {

enum class SolverKind { selfplay, mcts, hvraa, lego, random, exact };

/// Throws rudu::Error(unknown_solver).
SolverKind parse_solver(std::string_view name);
std::string_view solver_name(SolverKind kind);

struct SolverSetup {
  SolverKind kind = SolverKind::hvraa;
  const nn::ModelParams* model = nullptr;  // selfplay only
  double threshold = 0.0;                  // ranked threshold used during search
  mcts::SearchConfig search{.simulations = 64, .temperature = 0.0};
  std::uint64_t seed = 0;
  pack::PackOptions options;
  oracle::OracleLimits oracle_limits;
};

struct SolveOutcome {
  pack::PackState state;
  bool dead = false;
};

/// Solves one instance with greedy action selection.
SolveOutcome solve(const pack::Instance& instance, const SolverSetup& setup);

struct EvalRow {
  int index = 0;
  std::uint64_t seed = 0;
  int n_items = 0;
  double h_star = 0.0;
  int h_tilde = 0;
  double reward = 0.0;
  std::optional<double> utilization;
  std::optional<int> reference_height;  // exact optimum when computed
  bool dead = false;
  bool optimal = false;
};

struct EvalReport {
  std::string solver;
  double mean_reward = 0.0;
  double reward_std = 0.0;
  double optimality_ratio = 0.0;
  double mean_utilization = 0.0;  // over packed instances
  int dead_count = 0;
  std::vector<EvalRow> rows;
};

struct EvalOptions {
  bool use_oracle = false;  // optimality against the exact optimum instead of H*
  int jobs = 1;
};

/// A row is optimal when H~ equals the exact optimum (when computed) or H*.
EvalReport evaluate(const SolverSetup& setup, const std::vector<pack::Instance>& instances,
                    const EvalOptions& options = {});

nlohmann::json report_to_json(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);

}  // namespace rudu::selfplay
