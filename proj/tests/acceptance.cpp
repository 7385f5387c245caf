// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code = number of failed
// criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "hybrid/arc_io.hpp"
#include "hybrid/hypotheses.hpp"
#include "hybrid/metrics.hpp"
#include "hybrid/report_io.hpp"
#include "hybrid/systems.hpp"

using namespace hybrid;

namespace {

int g_failures = 0;

void criterion(int n, const std::string& what, bool pass, const std::string& details) {
  std::printf("[%s] C%d %s (%s)\n", pass ? "PASS" : "FAIL", n, what.c_str(), details.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

ExampleParams zero_control_params() {
  ExampleParams p;
  p.forcing.kind = ForcingProfile::Kind::none;
  p.feedback_gains = {0.0, 0.0};
  return p;
}

StateVector random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-0.5, 3.0);
  std::uniform_real_distribution<double> vel(-3.0, 3.0);
  return {pos(rng), vel(rng)};
}

IntegratorConfig config_with_horizon(double horizon) {
  IntegratorConfig c;
  c.horizon = horizon;
  return c;
}

// ---------------------------------------------------------------------- C1/C2
void criteria_rho_oracle_and_bounds() {
  const SystemSpec sys = build_example(zero_control_params());
  const GridSpec grid{{-1.0, -4.0}, {3.5, 3.5}, 1e-3};

  const auto start = std::chrono::steady_clock::now();
  const RhoOracle oracle(sys, grid);

  std::mt19937_64 rng(2024);
  int oracle_violations = 0;
  int bound_violations = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const StateVector x = random_state(rng);
    const StateVector y = random_state(rng);
    const DistanceReport rep = rho_a(sys, x, y);
    const double ora = oracle.evaluate(x, y);
    const double gap = std::abs(rep.value - ora);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 5e-3) ++oracle_violations;

    const double lower = std::sqrt(norm_squared(subtract(x, y)) / 2.0);
    if (rep.branch_value(Branch::A00) < lower) ++bound_violations;
    if (sys.flow_set_fn(x) >= 0.0 || sys.in_jump_set(x) || sys.in_jump_image(x)) {
      if (rep.value > norm(subtract(x, y))) ++bound_violations;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream d1;
  d1 << "1000 pairs, worst |rho-oracle| = " << worst_gap << ", " << seconds << " s";
  criterion(1, "rho_A oracle equivalence within 5e-3 in under 2 minutes",
            oracle_violations == 0 && seconds <= 120.0, d1.str());

  std::ostringstream d2;
  d2 << bound_violations << " violations of value <= ||x-y|| and A00 >= ||x-y||/sqrt(2)";
  criterion(2, "rho_A upper and A00 lower bounds hold exactly", bound_violations == 0, d2.str());
}

// ------------------------------------------------------------------------- C3
void criterion_event_accuracy() {
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 0.0);
  const HybridArc arc = simulate(ball, {1.0, 0.0}, config_with_horizon(5.0));
  bool pass = arc.jumps.size() >= 1;
  std::ostringstream d;
  if (pass) {
    const auto& j = arc.jumps[0];
    const double dt = std::abs(j.t - std::sqrt(2.0));
    const double rel = std::abs(j.x_plus[1] + 0.5 * j.x_minus[1]) / std::abs(j.x_minus[1]);
    pass = dt <= 1e-8 && rel <= 1e-12;
    d << "|t - sqrt(2)| = " << dt << ", restitution relative error = " << rel;
  } else {
    d << "no impact found";
  }
  criterion(3, "gravity impact time and restitution accuracy", pass, d.str());
}

// ------------------------------------------------------------------------- C4
void criterion_equilibrium() {
  const SystemSpec sys = build_example(zero_control_params());
  const HybridArc arc = simulate(sys, {1.0, 0.0}, config_with_horizon(100.0));
  double drift = 0.0;
  for (const auto& seg : arc.segments) {
    for (const auto& s : seg.samples) {
      drift = std::max({drift, std::abs(s.x[0] - 1.0), std::abs(s.x[1])});
    }
  }
  std::ostringstream d;
  d << "max drift over horizon 100 = " << drift;
  criterion(4, "equilibrium fidelity at (1,0) under zero control",
            arc.jumps.empty() && drift <= 1e-9, d.str());
}

// ------------------------------------------------------------------------- C5
void criterion_hypothesis_suite() {
  const SystemSpec sys = build_example(zero_control_params());
  ExampleParams forced;
  const HybridArc ref = make_reference(forced, {2.0, 0.0}, config_with_horizon(20.0));
  const HypothesisReport report = run_hypothesis_checks(sys, &ref, 10.0);

  const double fwd = report.conditions.at("ii_forward_transversality").margin;
  const double bwd = report.conditions.at("iii_backward_transversality").margin;
  bool pass = report.all_pass() && fwd >= 0.39 && bwd >= 0.39 && std::abs(fwd - 0.5) <= 1e-2 &&
              std::abs(bwd - 0.4) <= 1e-2;

  // Mutants must produce the designated failures.
  SystemSpec identity_jump = sys;
  identity_jump.jump_map = [](const StateVector& x) { return x; };
  const auto mut1 = check_jump_structure(identity_jump, jump_set_sampler(identity_jump));
  const bool mut1_ok = mut1.conditions.at("i_separation").verdict == Verdict::fail;

  ExampleParams degenerate = zero_control_params();
  degenerate.jump_threshold = 1e-12;
  const SystemSpec flat = build_example(degenerate);
  const auto mut2 = check_transversality(flat, ProbeDirection::forward, jump_set_sampler(flat));
  const bool mut2_ok =
      mut2.conditions.at("ii_forward_transversality").verdict == Verdict::fail;

  std::ostringstream d;
  d << "all_pass=" << (report.all_pass() ? "yes" : "no") << ", forward margin " << fwd
    << ", backward margin " << bwd << ", G=identity fails separation: " << (mut1_ok ? "yes" : "no")
    << ", r=0 fails transversality: " << (mut2_ok ? "yes" : "no");
  criterion(5, "hypothesis suite margins and designated mutant failures",
            pass && mut1_ok && mut2_ok, d.str());
}

// ------------------------------------------------------------------------- C6
void criterion_lemma_probes() {
  const SystemSpec sys = build_example(zero_control_params());
  const double r = 0.5;
  IntegratorConfig config = config_with_horizon(3.0);
  LemmaProbeOptions options;
  options.samples_per_eps = 200;

  bool pass = true;
  std::ostringstream d;
  for (ProbeDirection dir : {ProbeDirection::forward, ProbeDirection::backward}) {
    const LemmaProbeTable table =
        lemma_probe(sys, dir, {0.1, 0.01, 0.001}, config, options);
    double prev = std::numeric_limits<double>::infinity();
    d << to_string(dir) << ":";
    for (const auto& row : table.rows) {
      d << " " << row.max_mismatch_time;
      if (!row.reached || !(row.max_mismatch_time < prev) ||
          row.max_mismatch_time > 5.0 * row.eps_in / r) {
        pass = false;
      }
      prev = row.max_mismatch_time;
    }
    d << "; ";
  }
  criterion(6, "lemma probes finite, decreasing and within 5*eps/r both directions", pass,
            d.str());
}

// ------------------------------------------------------------------------- C7
void criterion_peaking() {
  ExampleParams p;  // forced reference from (2, 0)
  const IntegratorConfig config = config_with_horizon(20.0);
  const SystemSpec plant = build_example(p);
  const HybridArc ref = simulate(plant, {2.0, 0.0}, config);
  const HybridArc offset = simulate(plant, {2.02, 0.0}, config);

  bool pass = !ref.jumps.empty() && !offset.jumps.empty();
  std::ostringstream d;
  if (pass) {
    // The equal-time mismatch is measured around the first impact, where the
    // jump times of the two runs disagree.
    const double t1 = ref.jumps[0].t;
    const ClosenessWitness euclid = equal_time_euclidean_sup(ref, offset, 1e-3, t1 - 1.0, t1 + 1.0);
    const double graphical = graphical_eps(ref, offset).epsilon;
    const double rho = rho_eps(ref, offset, plant).epsilon;
    pass = euclid.value >= 5.0 * graphical && euclid.value >= 5.0 * rho;
    d << "euclid sup " << euclid.value << " at t=" << euclid.t << " (first impact at " << t1
      << "), graphical " << graphical << ", rho " << rho << " (ratios "
      << euclid.value / graphical << ", " << euclid.value / rho << ")";
  } else {
    d << "missing impacts in the reference or offset run";
  }
  criterion(7, "equal-time peaking exceeds graphical and rho epsilon by 5x", pass, d.str());
}

// ------------------------------------------------------------------------- C8
struct TrackingOutcome {
  bool ok = false;
  double trace_terminal = 0.0;
  double trace_max = 0.0;
  std::vector<double> tail;
};

TrackingOutcome tracking_run(const ExampleParams& p, double offset0) {
  TrackingOutcome out;
  const IntegratorConfig config = config_with_horizon(20.0);
  auto ref = std::make_shared<HybridArc>(make_reference(p, {2.0, 0.0}, config));
  if (ref->jumps.empty()) return out;
  const SystemSpec plant = build_example(p);
  const SystemSpec controlled = build_example(p, ref);
  IntegratorConfig track_config = config;
  track_config.horizon = std::min(config.horizon, ref->end_time());
  const HybridArc tracked = simulate(controlled, {2.0 + offset0, 0.0}, track_config);
  if (tracked.terminated_reason != TerminationReason::horizon) return out;

  const auto trace = rho_trace(*ref, tracked, plant, 1e-3);
  if (trace.empty()) return out;
  for (const auto& [t, v] : trace) out.trace_max = std::max(out.trace_max, v);
  out.trace_terminal = trace.back().second;

  const double H = std::min(ref->end_time(), tracked.end_time());
  const auto profile = graphical_closeness_profile(*ref, tracked);
  for (double frac : {0.0, 0.25, 0.5, 0.75}) {
    out.tail.push_back(profile.report(frac * H).epsilon);
  }
  out.ok = true;
  return out;
}

bool tracking_passes(const TrackingOutcome& out) {
  if (!out.ok || out.tail.size() != 4) return false;
  if (out.trace_terminal > 0.1 * out.trace_max) return false;
  for (std::size_t i = 1; i < out.tail.size(); ++i) {
    if (out.tail[i] > out.tail[i - 1] + 1e-12) return false;
  }
  return out.tail[3] <= 0.2 * out.tail[0];
}

void criterion_tracking() {
  ExampleParams p;  // default gains (2, 2)
  TrackingOutcome out = tracking_run(p, 0.05);
  bool pass = tracking_passes(out);
  std::string gains = "(2,2)";
  if (!pass) {
    // Documented fallback: grid search over K in {1,2,4,8}^2.
    for (double k1 : {1.0, 2.0, 4.0, 8.0}) {
      for (double k2 : {1.0, 2.0, 4.0, 8.0}) {
        ExampleParams q = p;
        q.feedback_gains = {k1, k2};
        const TrackingOutcome trial = tracking_run(q, 0.05);
        if (tracking_passes(trial)) {
          out = trial;
          pass = true;
          gains = "(" + std::to_string(k1) + "," + std::to_string(k2) + ")";
        }
        if (pass) break;
      }
      if (pass) break;
    }
  }
  std::ostringstream d;
  d << "gains " << gains << ", rho trace terminal/max = "
    << (out.trace_max > 0 ? out.trace_terminal / out.trace_max : 0.0) << ", tail profile [";
  for (std::size_t i = 0; i < out.tail.size(); ++i) d << (i ? ", " : "") << out.tail[i];
  d << "]";
  criterion(8, "controlled tracking decays in rho trace and graphical tail", pass, d.str());
}

// ------------------------------------------------------------------------- C9
void criterion_sweep() {
  ExampleParams p;
  const IntegratorConfig config = config_with_horizon(20.0);
  auto ref = std::make_shared<HybridArc>(make_reference(p, {2.0, 0.0}, config));
  const SystemSpec controlled = build_example(p, ref);
  const double H = ref->end_time();
  SweepOptions options;
  options.seed = 7;
  const StabilityReport report = stability_sweep(
      controlled, *ref, {0.1, 0.05, 0.01}, 20, {0.0, H / 4, H / 2, 3 * H / 4}, config, options);

  std::ostringstream d;
  d << "graphical eps per radius:";
  bool calibrated = true;
  for (const auto& row : report.rows) {
    d << " " << row.graphical;
    if (row.rho > row.graphical + 1e-12) calibrated = false;
    if (row.failures != 0) d << " (failures " << row.failures << ")";
  }
  d << "; rho<=graphical calibration " << (calibrated ? "holds" : "violated") << " (recorded)";
  criterion(9, "sweep graphical epsilon non-increasing as the radius shrinks",
            report.monotone_in_delta, d.str());
}

// ------------------------------------------------------------------------ C10
void criterion_determinism() {
  ExampleParams p;
  const IntegratorConfig config = config_with_horizon(12.0);
  auto once = [&]() {
    auto ref = std::make_shared<HybridArc>(make_reference(p, {2.0, 0.0}, config));
    const SystemSpec plant = build_example(p);
    const SystemSpec controlled = build_example(p, ref);
    IntegratorConfig tc = config;
    tc.horizon = std::min(config.horizon, ref->end_time());
    const HybridArc tracked = simulate(controlled, {2.05, 0.0}, tc);
    nlohmann::json bundle;
    bundle["arc"] = arc_to_json(tracked);
    bundle["graphical"] = closeness_report_to_json(graphical_eps(*ref, tracked));
    bundle["rho"] = closeness_report_to_json(rho_eps(*ref, tracked, plant));
    SweepOptions options;
    options.seed = 3;
    bundle["sweep"] = stability_report_to_json(
        stability_sweep(controlled, *ref, {0.05, 0.01}, 4, {0.0, 5.0}, config, options));
    return bundle;
  };
  const std::string first = once().dump();
  const std::string second = once().dump();

  // Arc JSON round-trip.
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 0.0);
  const HybridArc arc = simulate(ball, {1.0, 0.0}, config_with_horizon(4.0));
  const std::string dumped = arc_to_json(arc).dump();
  const bool round_trip = arc_to_json(arc_from_json(nlohmann::json::parse(dumped))).dump() == dumped;

  std::ostringstream d;
  d << "report bytes equal: " << (first == second ? "yes" : "no")
    << ", arc JSON round-trip exact: " << (round_trip ? "yes" : "no");
  criterion(10, "bit-identical reports under identical configs and exact arc round-trip",
            first == second && round_trip, d.str());
}

}  // namespace

int main() {
  criteria_rho_oracle_and_bounds();
  criterion_event_accuracy();
  criterion_equilibrium();
  criterion_hypothesis_suite();
  criterion_lemma_probes();
  criterion_peaking();
  criterion_tracking();
  criterion_sweep();
  criterion_determinism();
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
