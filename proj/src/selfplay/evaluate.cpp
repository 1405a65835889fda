#include "rudu/selfplay/evaluate.hpp"

#include <cmath>
#include <cstdio>

#include "rudu/error.hpp"
#include "rudu/heuristics/heuristics.hpp"
#include "rudu/pack/generator.hpp"
#include "rudu/selfplay/trainer.hpp"
#include "rudu/util/parallel.hpp"

namespace rudu::selfplay {

namespace {

constexpr std::pair<SolverKind, std::string_view> kSolverNames[] = {
    {SolverKind::selfplay, "selfplay"}, {SolverKind::mcts, "mcts"},
    {SolverKind::hvraa, "hvraa"},       {SolverKind::lego, "lego"},
    {SolverKind::random, "random"},     {SolverKind::exact, "exact"},
};

pack::PackState greedy_search_solve(const pack::Instance& instance, const SolverSetup& setup,
                                    std::mt19937_64& rng) {
  pack::PackState state(instance, setup.options);
  while (!state.is_terminal()) {
    mcts::SearchResult result;
    if (setup.kind == SolverKind::mcts) {
      result = mcts::rollout_search(state, setup.search.simulations, rng, setup.search.c_puct, 0.0);
    } else {
      auto search = setup.search;
      search.root_noise = false;
      search.temperature = 0.0;
      result = mcts::search(state, *setup.model, search, setup.threshold, rng);
    }
    const auto best = std::max_element(result.visits.begin(), result.visits.end());
    state.apply(state.action_at(static_cast<int>(best - result.visits.begin())));
  }
  return state;
}

}  // namespace

SolverKind parse_solver(std::string_view name) {
  for (const auto& [kind, label] : kSolverNames) {
    if (label == name) return kind;
  }
  fail(ErrorKind::unknown_solver, "unknown solver '" + std::string(name) +
                                      "' (expected selfplay, mcts, hvraa, lego, random or exact)");
}

std::string_view solver_name(SolverKind kind) {
  for (const auto& [k, label] : kSolverNames) {
    if (k == kind) return label;
  }
  return "unknown";
}

SolveOutcome solve(const pack::Instance& instance, const SolverSetup& setup) {
  std::mt19937_64 rng(pack::derive_seed(setup.seed, instance.seed));
  switch (setup.kind) {
    case SolverKind::hvraa: {
      auto r = heuristics::hvraa_solve(instance, setup.options);
      return {std::move(r.state), r.dead};
    }
    case SolverKind::lego: {
      auto r = heuristics::lego_solve(instance, setup.options);
      return {std::move(r.state), r.dead};
    }
    case SolverKind::random: {
      auto r = heuristics::random_solve(instance, rng(), setup.options);
      return {std::move(r.state), r.dead};
    }
    case SolverKind::exact: {
      pack::PackState probe(instance, setup.options);
      const auto r = oracle::solve_exact(instance, probe.height(), setup.oracle_limits);
      auto state = pack::replay(instance, r.witness, setup.options);
      return {std::move(state), false};
    }
    case SolverKind::selfplay:
      require(setup.model != nullptr, "the selfplay solver needs a model");
      [[fallthrough]];
    case SolverKind::mcts: {
      auto state = greedy_search_solve(instance, setup, rng);
      const bool dead = state.is_dead();
      return {std::move(state), dead};
    }
  }
  fail(ErrorKind::unknown_solver, "unhandled solver");
}

EvalReport evaluate(const SolverSetup& setup, const std::vector<pack::Instance>& instances,
                    const EvalOptions& options) {
  EvalReport report;
  report.solver = std::string(solver_name(setup.kind));
  report.rows.resize(instances.size());

  parallel_for(instances.size(), options.jobs, [&](std::size_t i) {
    const auto& instance = instances[i];
    EvalRow& row = report.rows[i];
    row.index = static_cast<int>(i);
    row.seed = instance.seed;
    row.n_items = instance.size();
    const auto bound = pack::h_star(instance);
    row.h_star = bound.to_double();

    SolveOutcome outcome{pack::PackState(instance, setup.options)};
    try {
      outcome = solve(instance, setup);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::infeasible) throw;
      outcome.dead = true;
    }
    row.dead = outcome.dead;
    row.h_tilde = outcome.state.filled_height();
    row.reward = outcome.state.terminal_reward();
    row.utilization = pack::utilization(outcome.state);

    if (options.use_oracle) {
      pack::PackState probe(instance, setup.options);
      try {
        row.reference_height = oracle::solve_exact(instance, probe.height(), setup.oracle_limits).min_height;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::infeasible && e.kind() != ErrorKind::budget_exceeded) throw;
      }
    }
    if (!row.dead) {
      row.optimal = row.reference_height ? row.h_tilde == *row.reference_height
                                         : pack::Rational(row.h_tilde) == bound;
    }
  });

  const double n = static_cast<double>(instances.size());
  int packed = 0;
  int optimal = 0;
  for (const auto& row : report.rows) {
    report.mean_reward += row.reward;
    if (row.dead) ++report.dead_count;
    if (row.optimal) ++optimal;
    if (row.utilization) {
      report.mean_utilization += *row.utilization;
      ++packed;
    }
  }
  if (!instances.empty()) {
    report.mean_reward /= n;
    for (const auto& row : report.rows) {
      report.reward_std += (row.reward - report.mean_reward) * (row.reward - report.mean_reward);
    }
    report.reward_std = std::sqrt(report.reward_std / n);
    report.optimality_ratio = optimal / n;
  }
  if (packed > 0) report.mean_utilization /= packed;
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row = {{"index", r.index}, {"seed", r.seed}, {"n_items", r.n_items},
                          {"h_star", r.h_star}, {"h_tilde", r.h_tilde}, {"reward", r.reward},
                          {"dead", r.dead}, {"optimal", r.optimal}};
    row["utilization"] = r.utilization ? nlohmann::json(*r.utilization) : nlohmann::json(nullptr);
    row["reference_height"] = r.reference_height ? nlohmann::json(*r.reference_height) : nlohmann::json(nullptr);
    rows.push_back(std::move(row));
  }
  return {{"solver", report.solver},
          {"mean_reward", report.mean_reward},
          {"reward_std", report.reward_std},
          {"optimality_ratio", report.optimality_ratio},
          {"mean_utilization", report.mean_utilization},
          {"dead_count", report.dead_count},
          {"rows", std::move(rows)}};
}

std::string report_to_csv(const EvalReport& report) {
  std::string out = "index,seed,n_items,h_star,h_tilde,reward,utilization,dead,optimal\n";
  char line[256];
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%d,%llu,%d,%.6f,%d,%.9f,%s,%d,%d\n", r.index,
                  static_cast<unsigned long long>(r.seed), r.n_items, r.h_star, r.h_tilde, r.reward,
                  r.utilization ? std::to_string(*r.utilization).c_str() : "", r.dead ? 1 : 0,
                  r.optimal ? 1 : 0);
    out += line;
  }
  return out;
}

}  // namespace rudu::selfplay
