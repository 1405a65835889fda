#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rudu/error.hpp"
#include "rudu/io/formats.hpp"
#include "rudu/io/render.hpp"
#include "rudu/mcts/search.hpp"
#include "rudu/oracle/exact.hpp"
#include "rudu/oran/report.hpp"
#include "rudu/pack/generator.hpp"
#include "rudu/selfplay/evaluate.hpp"
#include "rudu/selfplay/trainer.hpp"
#include "rudu/simd/kernels.hpp"
#include "rudu/util/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rudu;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  int count = 100;
  int n_items = 10;
  int width = 15;
  int h_min = 2;
  int h_max = 15;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 0;
};

void cmd_generate(const GenerateArgs& a) {
  require(a.count >= 0, "--count must be >= 0");
  fs::create_directories(a.out);
  std::vector<std::string> files(static_cast<std::size_t>(a.count));
  std::vector<int> heights(files.size());
  parallel_for(files.size(), a.jobs, [&](std::size_t i) {
    const auto seed = pack::derive_seed(a.seed, i);
    const auto instance = pack::sample_sliced_instance(a.width, a.h_min, a.h_max, a.n_items, seed);
    char name[32];
    std::snprintf(name, sizeof name, "instance_%04zu.json", i);
    files[i] = name;
    heights[i] = static_cast<int>(pack::h_star(instance).num());
    io::write_json_atomic(fs::path(a.out) / name, io::instance_to_json(instance));
  });
  json manifest = {{"count", a.count},   {"n_items", a.n_items}, {"width", a.width},
                   {"h_min", a.h_min},   {"h_max", a.h_max},     {"seed", a.seed},
                   {"files", files},     {"h_star", heights}};
  io::write_json_atomic(fs::path(a.out) / "manifest.json", manifest);
  std::cerr << "wrote " << a.count << " instances to " << a.out << "\n";
}

std::vector<pack::Instance> load_instances(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::missing_file, "instance directory not found: " + dir.string());
  std::vector<fs::path> paths;
  if (fs::exists(dir / "manifest.json")) {
    const auto manifest = io::read_json(dir / "manifest.json");
    for (const auto& f : manifest.at("files")) paths.push_back(dir / f.get<std::string>());
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
  }
  std::vector<pack::Instance> out;
  for (const auto& p : paths) out.push_back(io::instance_from_json(io::read_json(p)));
  return out;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string preset = "desk";
  std::string out;
  std::optional<int> iterations, episodes, simulations, train_steps, batch_size, threads, channels,
      conv_layers, checkpoint_every;
  std::optional<double> learning_rate, l2, percentile, c_puct;
  std::optional<std::uint64_t> seed;
  std::optional<bool> augment;
  bool no_wall_time = false;
};

selfplay::TrainConfig resolve_train_config(const TrainArgs& a) {
  selfplay::TrainConfig base;
  if (a.preset == "desk") {
    base = selfplay::TrainConfig::desk();
  } else if (a.preset == "full") {
    base = selfplay::TrainConfig::full();
  } else {
    fail(ErrorKind::invalid_argument, "unknown preset '" + a.preset + "' (expected desk or full)");
  }
  auto c = a.config.empty() ? base : selfplay::train_config_from_json(io::read_json(a.config), base);
  if (a.iterations) c.iterations = *a.iterations;
  if (a.episodes) c.episodes_per_iteration = *a.episodes;
  if (a.simulations) c.search.simulations = *a.simulations;
  if (a.train_steps) c.train_steps = *a.train_steps;
  if (a.batch_size) c.batch_size = *a.batch_size;
  if (a.threads) c.threads = *a.threads;
  if (a.channels) c.channels = *a.channels;
  if (a.conv_layers) c.conv_layers = *a.conv_layers;
  if (a.checkpoint_every) c.checkpoint_every = *a.checkpoint_every;
  if (a.learning_rate) c.learning_rate = *a.learning_rate;
  if (a.l2) c.l2 = *a.l2;
  if (a.percentile) c.percentile = *a.percentile;
  if (a.c_puct) c.search.c_puct = *a.c_puct;
  if (a.seed) c.seed = *a.seed;
  if (a.augment) c.augment = *a.augment;
  if (a.no_wall_time) c.record_wall_time = false;
  c.validate();
  return c;
}

void cmd_train(const TrainArgs& a) {
  const auto config = resolve_train_config(a);
  selfplay::run_training(config, fs::path(a.out), [](const selfplay::IterationMetrics& m) {
    std::fprintf(stderr, "iteration %d  reward %.4f  optimal %.2f  loss %.4f  %.1fs\n", m.iteration,
                 m.mean_reward, m.optimality_ratio, m.loss, m.wall_seconds);
  });
}

// ---- solver setup shared by eval / solve / scenario ---------------------------

struct SolverArgs {
  std::string solver = "hvraa";
  std::string model;
  int simulations = 64;
  double c_puct = 1.5;
  std::uint64_t seed = 0;
  std::uint64_t node_limit = 50'000'000;
};

struct LoadedSolver {
  selfplay::SolverSetup setup;
  std::optional<selfplay::Checkpoint> checkpoint;
};

LoadedSolver make_solver(const SolverArgs& a) {
  LoadedSolver out;
  auto& s = out.setup;
  s.kind = selfplay::parse_solver(a.solver);
  s.search.simulations = a.simulations;
  s.search.c_puct = a.c_puct;
  s.search.temperature = 0.0;
  s.seed = a.seed;
  s.oracle_limits.node_limit = a.node_limit;
  if (s.kind == selfplay::SolverKind::selfplay) {
    if (a.model.empty()) fail(ErrorKind::invalid_argument, "--model is required for the selfplay solver");
    out.checkpoint = selfplay::load_checkpoint(a.model);
    s.threshold = out.checkpoint->threshold();
    s.options = out.checkpoint->config.pack_options();
  }
  s.search.validate();
  return out;
}

// The selfplay model fixes the grid and item count; check before solving.
void check_model_fits(const LoadedSolver& solver, const pack::Instance& instance) {
  if (!solver.checkpoint) return;
  const auto& net = solver.checkpoint->params.config();
  if (instance.size() != net.item_count() || instance.w_star != net.width) {
    fail(ErrorKind::incompatible_checkpoint,
         "model expects " + std::to_string(net.item_count()) + " items of width " + std::to_string(net.width) +
             ", instance has " + std::to_string(instance.size()) + " items and W* = " +
             std::to_string(instance.w_star));
  }
}

// The setup points into the checkpoint, so bind once the LoadedSolver has stopped moving.
void bind_model(LoadedSolver& solver) {
  if (solver.checkpoint) solver.setup.model = &solver.checkpoint->params;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  SolverArgs solver;
  std::string instances;
  std::string report;
  bool oracle = false;
  int jobs = 0;
};

void cmd_eval(EvalArgs a) {
  auto solver = make_solver(a.solver);
  bind_model(solver);
  const auto instances = load_instances(a.instances);
  for (const auto& inst : instances) check_model_fits(solver, inst);
  const auto report = selfplay::evaluate(solver.setup, instances, {.use_oracle = a.oracle, .jobs = a.jobs});
  auto j = selfplay::report_to_json(report);
  j["settings"] = {{"instances", a.instances}, {"model", a.solver.model},     {"simulations", a.solver.simulations},
                   {"c_puct", a.solver.c_puct}, {"seed", a.solver.seed},       {"oracle", a.oracle},
                   {"threshold", solver.setup.threshold}};
  io::write_json_atomic(a.report, j);
  auto csv_path = fs::path(a.report);
  csv_path.replace_extension(".csv");
  io::write_text_atomic(csv_path, selfplay::report_to_csv(report));
  std::printf("solver %s  instances %zu  mean reward %.4f  std %.4f  optimality %.3f  utilization %.4f  dead %d\n",
              report.solver.c_str(), report.rows.size(), report.mean_reward, report.reward_std,
              report.optimality_ratio, report.mean_utilization, report.dead_count);
}

// ---- solve ------------------------------------------------------------------

struct SolveArgs {
  SolverArgs solver;
  std::string instance;
  std::string out;
  std::string dump_tree;
  int height = 0;
};

void cmd_solve(SolveArgs a) {
  auto solver = make_solver(a.solver);
  bind_model(solver);
  const auto instance = io::instance_from_json(io::read_json(a.instance));
  check_model_fits(solver, instance);
  if (a.height > 0) solver.setup.options.height = a.height;

  json out;
  if (solver.setup.kind == selfplay::SolverKind::exact) {
    pack::PackState probe(instance, solver.setup.options);
    const auto r = oracle::solve_exact(instance, probe.height(), solver.setup.oracle_limits);
    const auto state = pack::replay(instance, r.witness, solver.setup.options);
    out = io::pack_result_to_json(io::make_pack_result(state));
    out["oracle"] = io::oracle_result_to_json(r, instance);
  } else {
    const auto outcome = selfplay::solve(instance, solver.setup);
    out = io::pack_result_to_json(io::make_pack_result(outcome.state));
  }
  out["solver"] = a.solver.solver;

  if (!a.dump_tree.empty()) {
    const auto kind = solver.setup.kind;
    if (kind != selfplay::SolverKind::mcts && kind != selfplay::SolverKind::selfplay) {
      fail(ErrorKind::invalid_argument, "--dump-tree needs the mcts or selfplay solver");
    }
    pack::PackState root(instance, solver.setup.options);
    std::mt19937_64 rng(pack::derive_seed(solver.setup.seed, instance.seed));
    std::optional<mcts::RolloutEvaluator> rollout;
    std::optional<mcts::NetEvaluator> net;
    mcts::LeafEvaluator* evaluator;
    auto config = solver.setup.search;
    if (kind == selfplay::SolverKind::mcts) {
      config.untried_first = true;
      evaluator = &rollout.emplace(rng);
    } else {
      evaluator = &net.emplace(*solver.setup.model, solver.setup.threshold, rng);
    }
    mcts::SearchTree tree(root, *evaluator, config, rng);
    tree.run(config.simulations);
    io::write_text_atomic(a.dump_tree, tree.dump() + "\n");
  }

  const std::string text = out.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    io::write_text_atomic(a.out, text);
  }
}

// ---- region / scenario --------------------------------------------------------

struct RegionArgs {
  std::uint64_t seed = 0;
  std::string out;
  std::string sites_csv;
  std::string export_csv;
  int n_sites = 100;
  int n_dus = 10;
};

void cmd_region(const RegionArgs& a) {
  oran::RegionConfig config;
  config.n_sites = a.n_sites;
  config.n_dus = a.n_dus;
  auto region = oran::generate_synthetic_region(config, a.seed);
  if (!a.sites_csv.empty()) {
    // Imported sites replace the synthetic ones; DUs are reconnected to them.
    region.sites = io::sites_from_csv(io::read_text(a.sites_csv));
    for (const auto& s : region.sites) s.validate();
    region.config.n_sites = static_cast<int>(region.sites.size());
    for (auto& du : region.dus) du = oran::connect_rus(du, region.sites, config.rus_per_du).du;
  }
  io::write_json_atomic(a.out, io::region_to_json(region));
  if (!a.export_csv.empty()) io::write_text_atomic(a.export_csv, io::sites_to_csv(region.sites));
  std::cerr << "wrote region with " << region.sites.size() << " sites and " << region.dus.size() << " DUs\n";
}

struct ScenarioArgs {
  std::string region;
  int hour = oran::kPeakHour;
  std::vector<int> dus;
  int samples = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> solvers{"hvraa", "lego", "mcts"};
  SolverArgs solver;
  std::string report;
  int jobs = 0;
};

void cmd_scenario(ScenarioArgs a) {
  const auto region = io::region_from_json(io::read_json(a.region));
  oran::ScenarioRequest request;
  request.hour = a.hour;
  request.dus = a.dus;
  request.samples = a.samples;
  request.seed = a.seed;
  request.jobs = a.jobs;
  std::vector<LoadedSolver> loaded;
  loaded.reserve(a.solvers.size());
  for (const auto& name : a.solvers) {
    auto args = a.solver;
    args.solver = name;
    loaded.push_back(make_solver(args));
  }
  for (auto& s : loaded) {
    bind_model(s);
    if (s.checkpoint) {
      for (int du : a.dus) {
        for (const auto& inst : oran::sample_du_instances(region, du, a.hour, std::min(a.samples, 1), a.seed)) {
          check_model_fits(s, inst);
        }
      }
    }
    request.solvers.push_back(s.setup);
  }
  const auto report = oran::run_scenario(region, request);
  std::cout << oran::scenario_report_table(report);
  if (!a.report.empty()) {
    auto j = oran::scenario_report_to_json(report);
    j["region"] = a.region;
    j["region_seed"] = region.seed;
    io::write_json_atomic(a.report, j);
  }
}

// ---- render -------------------------------------------------------------------

void cmd_render(const std::string& packing, const std::string& out, int cell) {
  const auto result = io::pack_result_from_json(io::read_json(packing));
  io::write_text_atomic(out, io::render_svg(result, {.cell_px = cell}));
}

void add_solver_options(CLI::App* cmd, SolverArgs& s) {
  cmd->add_option("--solver", s.solver, "selfplay, mcts, hvraa, lego, random or exact")->capture_default_str();
  cmd->add_option("--model", s.model, "checkpoint .bin for the selfplay solver");
  cmd->add_option("--simulations", s.simulations, "search simulations per move")->capture_default_str();
  cmd->add_option("--c-puct", s.c_puct, "search exploration constant")->capture_default_str();
  cmd->add_option("--seed", s.seed, "solver seed")->capture_default_str();
  cmd->add_option("--node-limit", s.node_limit, "exact solver node budget")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strip packing by self-play search, with O-RAN DU scenarios"};
  app.require_subcommand(1);
  app.set_version_flag("--version", [] {
    return std::string("rudu ") + kVersion + " (checkpoint schema " + std::to_string(nn::kCheckpointSchema) +
           ", kernels " + std::string(simd::isa_name(simd::active_isa())) + ")";
  });

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write sliced instances and a manifest");
  generate->add_option("--count", gen.count)->capture_default_str();
  generate->add_option("--n-items", gen.n_items)->capture_default_str();
  generate->add_option("--width", gen.width)->capture_default_str();
  generate->add_option("--h-min", gen.h_min)->capture_default_str();
  generate->add_option("--h-max", gen.h_max)->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();
  generate->add_option("--out", gen.out)->required();
  generate->add_option("--jobs", gen.jobs, "0 uses every core")->capture_default_str();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "ranked-reward self-play training");
  train->add_option("--config", tr.config, "JSON config; flags override it");
  train->add_option("--preset", tr.preset, "desk or full base values")->capture_default_str();
  train->add_option("--out", tr.out, "run directory")->required();
  train->add_option("--iterations", tr.iterations);
  train->add_option("--episodes", tr.episodes);
  train->add_option("--simulations", tr.simulations);
  train->add_option("--train-steps", tr.train_steps);
  train->add_option("--batch-size", tr.batch_size);
  train->add_option("--threads", tr.threads);
  train->add_option("--channels", tr.channels);
  train->add_option("--conv-layers", tr.conv_layers);
  train->add_option("--checkpoint-every", tr.checkpoint_every);
  train->add_option("--lr", tr.learning_rate);
  train->add_option("--l2", tr.l2);
  train->add_option("--percentile", tr.percentile);
  train->add_option("--c-puct", tr.c_puct);
  train->add_option("--seed", tr.seed);
  train->add_flag("--augment,!--no-augment", tr.augment, "random item relabelling and mirroring of minibatches");
  train->add_flag("--no-wall-time", tr.no_wall_time, "write 0 in the wall_seconds column");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "evaluate a solver on an instance directory");
  add_solver_options(eval, ev.solver);
  eval->add_option("--instances", ev.instances)->required();
  eval->add_option("--report", ev.report, "JSON report; a CSV is written next to it")->required();
  eval->add_flag("--oracle", ev.oracle, "score optimality against the exact optimum");
  eval->add_option("--jobs", ev.jobs)->capture_default_str();

  SolveArgs so;
  auto* solve = app.add_subcommand("solve", "solve one instance");
  add_solver_options(solve, so.solver);
  solve->add_option("--instance", so.instance)->required();
  solve->add_option("--out", so.out, "write the packing here instead of stdout");
  solve->add_option("--dump-tree", so.dump_tree, "write the first-move search tree as JSON");
  solve->add_option("--height", so.height, "virtual height; 0 uses W*")->capture_default_str();

  RegionArgs rg;
  auto* region = app.add_subcommand("region", "generate a synthetic site region");
  region->add_option("--seed", rg.seed)->capture_default_str();
  region->add_option("--out", rg.out)->required();
  region->add_option("--sites-csv", rg.sites_csv, "import sites from CSV instead of sampling them");
  region->add_option("--export-csv", rg.export_csv, "also write the sites as CSV");
  region->add_option("--n-sites", rg.n_sites)->capture_default_str();
  region->add_option("--n-dus", rg.n_dus)->capture_default_str();

  ScenarioArgs sc;
  auto* scenario = app.add_subcommand("scenario", "per-DU request packing report");
  scenario->add_option("--region", sc.region)->required();
  scenario->add_option("--hour", sc.hour)->capture_default_str()->check(CLI::Range(0, 23));
  scenario->add_option("--du", sc.dus, "DU id; repeat for several")->required();
  scenario->add_option("--samples", sc.samples)->capture_default_str();
  scenario->add_option("--seed", sc.seed)->capture_default_str();
  scenario->add_option("--solvers", sc.solvers, "solvers to compare")->delimiter(',')->capture_default_str();
  scenario->add_option("--model", sc.solver.model, "checkpoint for the selfplay solver");
  scenario->add_option("--simulations", sc.solver.simulations)->capture_default_str();
  scenario->add_option("--report", sc.report, "JSON report");
  scenario->add_option("--jobs", sc.jobs)->capture_default_str();

  std::string packing, svg;
  int cell = 24;
  auto* render = app.add_subcommand("render", "draw a packing as SVG");
  render->add_option("--packing", packing)->required();
  render->add_option("--out", svg)->required();
  render->add_option("--cell", cell, "pixels per grid cell")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*generate) cmd_generate(gen);
    if (*train) cmd_train(tr);
    if (*eval) cmd_eval(ev);
    if (*solve) cmd_solve(so);
    if (*region) cmd_region(rg);
    if (*scenario) {
      sc.solver.seed = sc.seed;
      cmd_scenario(sc);
    }
    if (*render) cmd_render(packing, svg, cell);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::invalid_argument);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::io);
  }
  return 0;
}
