// Command-line front end: simulation, tracking, hypothesis checks, lemma
// probes and stability sweeps for the impacting-oscillator example and the
// bouncing-ball testbed. See README.md for the config schema.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hybrid/arc_io.hpp"
#include "hybrid/hypotheses.hpp"
#include "hybrid/metrics.hpp"
#include "hybrid/report_io.hpp"
#include "hybrid/systems.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hybrid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 2;
constexpr int kExitSimFailure = 3;
constexpr int kExitCheckFailed = 4;

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> grid;
  std::optional<double> horizon;
  bool strict = false;
};

json load_config(const CliOptions& opt) {
  json cfg = json::object();
  if (!opt.config_path.empty()) {
    std::ifstream is(opt.config_path);
    if (!is) throw std::invalid_argument("cannot open config: " + opt.config_path);
    is >> cfg;
  }
  if (opt.seed) cfg["seed"] = *opt.seed;
  if (opt.grid) cfg["grid"] = *opt.grid;
  if (opt.horizon) {
    cfg["integrator"]["horizon"] = *opt.horizon;
  }
  return cfg;
}

double get_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

IntegratorConfig parse_integrator(const json& cfg) {
  IntegratorConfig c;
  c.horizon = 20.0;
  if (!cfg.contains("integrator")) return c;
  const json& i = cfg.at("integrator");
  c.step_initial = get_or(i, "step_initial", c.step_initial);
  c.step_min = get_or(i, "step_min", c.step_min);
  c.step_max = get_or(i, "step_max", c.step_max);
  c.rel_tol = get_or(i, "rel_tol", c.rel_tol);
  c.abs_tol = get_or(i, "abs_tol", c.abs_tol);
  c.event_tol = get_or(i, "event_tol", c.event_tol);
  c.horizon = get_or(i, "horizon", c.horizon);
  c.zeno_rate_cap = get_or(i, "zeno_rate_cap", c.zeno_rate_cap);
  if (i.contains("jump_cap")) c.jump_cap = i.at("jump_cap").get<int>();
  c.validate();
  return c;
}

ExampleParams parse_example_params(const json& cfg, ForcingProfile::Kind default_forcing) {
  ExampleParams p;
  p.forcing.kind = default_forcing;
  if (cfg.contains("system")) {
    const json& s = cfg.at("system");
    p.damping = get_or(s, "damping", p.damping);
    p.stiffness = get_or(s, "stiffness", p.stiffness);
    p.unloaded_position = get_or(s, "unloaded_position", p.unloaded_position);
    p.spring_constant_k = get_or(s, "spring_constant_k", p.spring_constant_k);
    p.restitution = get_or(s, "restitution", p.restitution);
    p.jump_threshold = get_or(s, "jump_threshold", p.jump_threshold);
    p.feedback_bound = get_or(s, "feedback_bound", p.feedback_bound);
    p.horizon = get_or(s, "horizon", p.horizon);
    if (s.contains("feedback_gains")) {
      p.feedback_gains = {s.at("feedback_gains").at(0).get<double>(),
                          s.at("feedback_gains").at(1).get<double>()};
    }
    if (s.contains("forcing")) {
      const json& f = s.at("forcing");
      const std::string kind = f.value("kind", "designed_bounce");
      p.forcing.kind = kind == "none" ? ForcingProfile::Kind::none
                                      : ForcingProfile::Kind::designed_bounce;
      p.forcing.apex = get_or(f, "apex", p.forcing.apex);
      p.forcing.impact_speed = get_or(f, "impact_speed", p.forcing.impact_speed);
      p.forcing.drop_time = get_or(f, "drop_time", p.forcing.drop_time);
      p.forcing.rise_time = get_or(f, "rise_time", p.forcing.rise_time);
    }
  }
  p.validate();
  return p;
}

json example_params_to_json(const ExampleParams& p) {
  return json{{"kind", "impacting_oscillator"},
              {"damping", p.damping},
              {"stiffness", p.stiffness},
              {"unloaded_position", p.unloaded_position},
              {"spring_constant_k", p.spring_constant_k},
              {"restitution", p.restitution},
              {"jump_threshold", p.jump_threshold},
              {"feedback_gains", {p.feedback_gains[0], p.feedback_gains[1]}},
              {"feedback_bound", p.feedback_bound},
              {"horizon", p.horizon},
              {"forcing",
               {{"kind", p.forcing.kind == ForcingProfile::Kind::none ? "none" : "designed_bounce"},
                {"apex", p.forcing.apex},
                {"impact_speed", p.forcing.impact_speed},
                {"drop_time", p.forcing.drop_time},
                {"rise_time", p.forcing.rise_time}}}};
}

json integrator_to_json(const IntegratorConfig& c) {
  return json{{"step_initial", c.step_initial}, {"step_min", c.step_min},
              {"step_max", c.step_max},         {"rel_tol", c.rel_tol},
              {"abs_tol", c.abs_tol},           {"event_tol", c.event_tol},
              {"jump_cap", c.jump_cap},         {"horizon", c.horizon},
              {"zeno_rate_cap", c.zeno_rate_cap}};
}

StateVector parse_x0(const json& cfg, StateVector fallback) {
  if (!cfg.contains("x0")) return fallback;
  StateVector x;
  for (const auto& v : cfg.at("x0")) x.push_back(v.get<double>());
  return x;
}

SystemSpec parse_system(const json& cfg, ForcingProfile::Kind default_forcing) {
  const std::string kind =
      cfg.contains("system") ? cfg.at("system").value("kind", "impacting_oscillator")
                             : "impacting_oscillator";
  if (kind == "impacting_oscillator") {
    return build_example(parse_example_params(cfg, default_forcing));
  }
  if (kind == "bouncing_ball") {
    const json s = cfg.contains("system") ? cfg.at("system") : json::object();
    return build_bouncing_ball(get_or(s, "gravity", 1.0), get_or(s, "restitution", 0.5),
                               get_or(s, "jump_threshold", 0.0));
  }
  throw std::invalid_argument("unknown system kind: " + kind);
}

fs::path ensure_out_dir(const CliOptions& opt) {
  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  return dir;
}

int arc_exit_code(const HybridArc& arc) {
  return arc.terminated_reason == TerminationReason::solver_failure ? kExitSimFailure : kExitOk;
}

int run_simulate(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const SystemSpec system = parse_system(cfg, ForcingProfile::Kind::designed_bounce);
  const IntegratorConfig config = parse_integrator(cfg);
  const StateVector x0 = parse_x0(cfg, StateVector{2.0, 0.0});
  HybridArc arc = simulate(system, x0, config);

  const fs::path dir = ensure_out_dir(opt);
  write_arc_csv(arc, (dir / "arc.csv").string());
  write_arc_json(arc, (dir / "arc.json").string());
  json manifest_cfg = cfg;
  manifest_cfg["integrator"] = integrator_to_json(config);
  manifest_cfg["x0"] = x0;
  write_json((dir / "manifest.json").string(),
             make_manifest("simulate", manifest_cfg, {"arc.csv", "arc.json"}));
  std::cout << "arc: " << arc.jumps.size() << " jumps, ends at t=" << arc.end_time()
            << " (" << to_string(arc.terminated_reason) << ")\n";
  return arc_exit_code(arc);
}

int run_reference(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const ExampleParams params = parse_example_params(cfg, ForcingProfile::Kind::designed_bounce);
  const IntegratorConfig config = parse_integrator(cfg);
  const StateVector x0 = parse_x0(cfg, StateVector{2.0, 0.0});
  HybridArc ref = make_reference(params, x0, config);

  const fs::path dir = ensure_out_dir(opt);
  write_arc_csv(ref, (dir / "reference.csv").string());
  write_arc_json(ref, (dir / "reference.json").string());
  write_trace_csv((dir / "rho_trace.csv").string(), {}, "rho_a");
  json manifest_cfg{{"system", example_params_to_json(params)},
                    {"integrator", integrator_to_json(config)},
                    {"x0", x0}};
  write_json((dir / "manifest.json").string(),
             make_manifest("reference", manifest_cfg,
                           {"reference.csv", "reference.json", "rho_trace.csv"}));
  std::cout << "reference: " << ref.jumps.size() << " jumps, ends at t=" << ref.end_time()
            << " (" << to_string(ref.terminated_reason) << ")\n";
  return arc_exit_code(ref);
}

int run_track(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const ExampleParams params = parse_example_params(cfg, ForcingProfile::Kind::designed_bounce);
  const IntegratorConfig config = parse_integrator(cfg);
  const double grid = get_or(cfg, "grid", 1e-3);
  const double window = get_or(cfg, "search_window", 0.0);
  const StateVector x0 = parse_x0(cfg, StateVector{2.0, 0.0});

  auto ref = std::make_shared<HybridArc>(make_reference(params, x0, config));
  StateVector x0_track = x0;
  if (cfg.contains("offset")) {
    const auto& off = cfg.at("offset");
    if (off.is_number()) {
      x0_track[0] += off.get<double>();
    } else {
      for (std::size_t i = 0; i < x0_track.size() && i < off.size(); ++i) {
        x0_track[i] += off[i].get<double>();
      }
    }
  } else {
    x0_track[0] += 0.05;
  }

  const SystemSpec plant = build_example(params);
  const SystemSpec controlled = build_example(params, ref);
  IntegratorConfig track_config = config;
  track_config.horizon = std::min(config.horizon, ref->end_time());
  HybridArc tracked = simulate(controlled, x0_track, track_config);

  const ClosenessReport graphical = graphical_eps(*ref, tracked, 0.0, window, grid);
  const ClosenessReport rho = rho_eps(*ref, tracked, plant, 0.0);
  const auto trace = rho_trace(*ref, tracked, plant, grid);

  const fs::path dir = ensure_out_dir(opt);
  write_arc_csv(*ref, (dir / "reference.csv").string());
  write_arc_csv(tracked, (dir / "tracked.csv").string());
  write_arc_json(*ref, (dir / "reference.json").string());
  write_arc_json(tracked, (dir / "tracked.json").string());
  write_trace_csv((dir / "rho_trace.csv").string(), trace, "rho_a");
  write_json((dir / "closeness_graphical.json").string(), closeness_report_to_json(graphical));
  write_json((dir / "closeness_rho.json").string(), closeness_report_to_json(rho));
  json manifest_cfg{{"system", example_params_to_json(params)},
                    {"integrator", integrator_to_json(config)},
                    {"x0", x0},
                    {"x0_track", x0_track},
                    {"grid", grid},
                    {"search_window", window}};
  write_json((dir / "manifest.json").string(),
             make_manifest("track", manifest_cfg,
                           {"reference.csv", "tracked.csv", "rho_trace.csv",
                            "closeness_graphical.json", "closeness_rho.json"}));
  std::cout << "graphical eps = " << graphical.epsilon << ", rho eps = " << rho.epsilon << "\n";
  return arc_exit_code(tracked);
}

int run_check(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const std::string kind =
      cfg.contains("system") ? cfg.at("system").value("kind", "impacting_oscillator")
                             : "impacting_oscillator";
  const IntegratorConfig config = parse_integrator(cfg);
  CheckOptions check;
  check.seed = cfg.value("seed", 1ULL);
  check.samples = cfg.value("check_samples", 10000L);
  const double R = get_or(cfg, "bound_R", 10.0);

  SystemSpec system = parse_system(cfg, ForcingProfile::Kind::none);
  std::optional<HybridArc> ref;
  if (kind == "impacting_oscillator") {
    const ExampleParams params = parse_example_params(cfg, ForcingProfile::Kind::designed_bounce);
    ref = make_reference(params, parse_x0(cfg, StateVector{2.0, 0.0}), config);
  }
  const HypothesisReport report = run_hypothesis_checks(system, ref ? &*ref : nullptr, R, check);

  const fs::path dir = ensure_out_dir(opt);
  write_json((dir / "hypothesis_report.json").string(), hypothesis_report_to_json(report));
  json manifest_cfg = cfg;
  write_json((dir / "manifest.json").string(),
             make_manifest("check", manifest_cfg, {"hypothesis_report.json"}));
  std::cout << hypothesis_report_to_text(report);
  if (opt.strict && !report.all_pass()) return kExitCheckFailed;
  return kExitOk;
}

int run_probe(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const SystemSpec system = parse_system(cfg, ForcingProfile::Kind::none);
  IntegratorConfig config = parse_integrator(cfg);
  config.horizon = std::min(config.horizon, 5.0);
  std::vector<double> eps_list{0.1, 0.01, 0.001};
  if (cfg.contains("eps_list")) {
    eps_list.clear();
    for (const auto& v : cfg.at("eps_list")) eps_list.push_back(v.get<double>());
  }
  LemmaProbeOptions options;
  options.seed = cfg.value("seed", 1ULL);
  options.samples_per_eps = cfg.value("probe_samples", 100);

  const fs::path dir = ensure_out_dir(opt);
  std::vector<std::string> outputs;
  for (ProbeDirection dir_kind : {ProbeDirection::forward, ProbeDirection::backward}) {
    const LemmaProbeTable table = lemma_probe(system, dir_kind, eps_list, config, options);
    const std::string name = std::string("probe_") + to_string(dir_kind) + ".json";
    write_json((dir / name).string(), lemma_table_to_json(table));
    outputs.push_back(name);
    std::cout << lemma_table_to_text(table);
  }
  write_json((dir / "manifest.json").string(), make_manifest("probe", cfg, outputs));
  return kExitOk;
}

int run_sweep(const CliOptions& opt) {
  const json cfg = load_config(opt);
  const ExampleParams params = parse_example_params(cfg, ForcingProfile::Kind::designed_bounce);
  const IntegratorConfig config = parse_integrator(cfg);
  const StateVector x0 = parse_x0(cfg, StateVector{2.0, 0.0});

  std::vector<double> radii{0.1, 0.05, 0.01};
  if (cfg.contains("radii")) {
    radii.clear();
    for (const auto& v : cfg.at("radii")) radii.push_back(v.get<double>());
  }
  const int samples = cfg.value("samples_per_radius", 20);
  auto ref = std::make_shared<HybridArc>(make_reference(params, x0, config));
  std::vector<double> t_grid;
  if (cfg.contains("t_grid")) {
    for (const auto& v : cfg.at("t_grid")) t_grid.push_back(v.get<double>());
  } else {
    const double H = ref->end_time();
    t_grid = {0.0, H / 4.0, H / 2.0, 3.0 * H / 4.0};
  }

  const SystemSpec controlled = build_example(params, ref);
  SweepOptions options;
  options.seed = cfg.value("seed", 1ULL);
  options.grid = get_or(cfg, "grid", 1e-3);
  options.search_window = get_or(cfg, "search_window", 0.0);
  const StabilityReport report =
      stability_sweep(controlled, *ref, radii, samples, t_grid, config, options);

  const fs::path dir = ensure_out_dir(opt);
  write_json((dir / "stability.json").string(), stability_report_to_json(report));
  write_text((dir / "stability.csv").string(), stability_report_to_csv(report));
  json manifest_cfg{{"system", example_params_to_json(params)},
                    {"integrator", integrator_to_json(config)},
                    {"x0", x0},
                    {"radii", radii},
                    {"samples_per_radius", samples},
                    {"t_grid", t_grid},
                    {"seed", options.seed},
                    {"grid", options.grid}};
  write_json((dir / "manifest.json").string(),
             make_manifest("sweep", manifest_cfg, {"stability.json", "stability.csv"}));
  std::cout << "sweep: monotone_in_delta=" << (report.monotone_in_delta ? "true" : "false")
            << " decaying_tail=" << (report.decaying_tail ? "true" : "false") << "\n";
  return kExitOk;
}

int run_example(const CliOptions& opt) {
  // One-shot reproduction bundle: reference, tracking run, hypothesis
  // checks, lemma probes and a small sweep, all under --out.
  int rc = 0;
  CliOptions sub = opt;
  sub.out_dir = (fs::path(opt.out_dir) / "track").string();
  rc = std::max(rc, run_track(sub));
  sub.out_dir = (fs::path(opt.out_dir) / "check").string();
  rc = std::max(rc, run_check(sub));
  sub.out_dir = (fs::path(opt.out_dir) / "probe").string();
  rc = std::max(rc, run_probe(sub));
  sub.out_dir = (fs::path(opt.out_dir) / "sweep").string();
  rc = std::max(rc, run_sweep(sub));
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid solution simulation and graphical-stability analysis"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON configuration file");
  app.add_option("--out", opt.out_dir, "output directory");
  std::uint64_t seed_opt = 0;
  double grid_opt = 0.0, horizon_opt = 0.0;
  auto* seed_flag = app.add_option("--seed", seed_opt, "RNG seed");
  auto* grid_flag = app.add_option("--grid", grid_opt, "dense time grid step");
  auto* horizon_flag = app.add_option("--horizon", horizon_opt, "integration horizon");
  app.add_flag("--strict", opt.strict, "exit 4 when a hypothesis check fails (check)");

  for (auto [name, desc] :
       {std::pair{"simulate", "simulate a configured system from x0"},
        std::pair{"reference", "generate the example reference solution"},
        std::pair{"track", "reference + offset tracking run with closeness reports"},
        std::pair{"check", "verify the structure conditions (i)-(iv)"},
        std::pair{"probe", "empirical jump-time-mismatch tables (both directions)"},
        std::pair{"sweep", "stability sweep over initial-condition radii"},
        std::pair{"example", "one-shot reproduction bundle"}}) {
    app.add_subcommand(name, desc)->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);
  if (!seed_flag->empty()) opt.seed = seed_opt;
  if (!grid_flag->empty()) opt.grid = grid_opt;
  if (!horizon_flag->empty()) opt.horizon = horizon_opt;

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "simulate") return run_simulate(opt);
    if (sub == "reference") return run_reference(opt);
    if (sub == "track") return run_track(opt);
    if (sub == "check") return run_check(opt);
    if (sub == "probe") return run_probe(opt);
    if (sub == "sweep") return run_sweep(opt);
    if (sub == "example") return run_example(opt);
  } catch (const std::invalid_argument& ex) {
    std::cerr << "invalid config: " << ex.what() << "\n";
    return kExitBadConfig;
  } catch (const nlohmann::json::exception& ex) {
    std::cerr << "invalid config: " << ex.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& ex) {
    std::cerr << "simulation failure: " << ex.what() << "\n";
    return kExitSimFailure;
  }
  return kExitOk;
}
