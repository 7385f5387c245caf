#include <doctest.h>

#include <cmath>

#include "hybrid/hypotheses.hpp"
#include "hybrid/systems.hpp"
#include "helpers.hpp"

using namespace hybrid;
using namespace test_helpers;

namespace {

SystemSpec example_system() { return build_example(zero_control_params()); }

HybridArc example_reference() {
  ExampleParams p;
  return make_reference(p, {2.0, 0.0}, default_config(20.0));
}

}  // namespace

TEST_CASE("the example system passes every structure condition") {
  const SystemSpec sys = example_system();
  const HybridArc ref = example_reference();
  const HypothesisReport report = run_hypothesis_checks(sys, &ref, 10.0);
  for (const auto& [name, cond] : report.conditions) {
    INFO(name, " margin=", cond.margin, " note=", cond.note);
    CHECK(cond.verdict == Verdict::pass);
  }
  CHECK(report.all_pass());

  // Forward margin r = 0.5, backward margin eps*r = 0.4; the jump-set edge
  // point is sampled deterministically so both are exact.
  CHECK(report.conditions.at("ii_forward_transversality").margin ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(report.conditions.at("iii_backward_transversality").margin ==
        doctest::Approx(0.4).epsilon(1e-9));
  CHECK(report.conditions.at("i_separation").margin == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(report.conditions.at("i_image_in_C").margin == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("an identity jump map fails the separation condition") {
  SystemSpec sys = example_system();
  sys.jump_map = [](const StateVector& x) { return x; };
  sys.image_event_fn = [](const StateVector& x) { return x[0]; };
  sys.image_predicate = [](const StateVector& x) { return x[1] <= -0.5; };
  const auto report = check_jump_structure(sys, jump_set_sampler(sys));
  const auto& sep = report.conditions.at("i_separation");
  CHECK(sep.verdict == Verdict::fail);
  REQUIRE(sep.counterexample.has_value());
  // The violation is reproducible at the counterexample: its image is in D.
  CHECK(sys.in_jump_set(sys.apply_jump(*sep.counterexample)));
}

TEST_CASE("a threshold of zero makes transversality fail with margin zero") {
  ExampleParams p = zero_control_params();
  p.jump_threshold = 1e-12;  // effectively r = 0: (0, 0) lies on the surface
  SystemSpec sys = build_example(p);
  const auto report = check_transversality(sys, ProbeDirection::forward, jump_set_sampler(sys));
  const auto& cond = report.conditions.at("ii_forward_transversality");
  CHECK(cond.verdict == Verdict::fail);
  CHECK(std::abs(cond.margin) <= 1e-9);
  REQUIRE(cond.counterexample.has_value());
  // Re-evaluating the violated inequality at the counterexample reproduces
  // the margin: the normal flow speed there equals x2.
  const StateVector& cex = *cond.counterexample;
  const StateVector f = sys.eval_flow(0.0, cex);
  CHECK(std::abs(-f[0] - cond.margin) <= 1e-12);
}

TEST_CASE("a constant jump map on an unbounded jump set fails properness") {
  SystemSpec sys = example_system();
  sys.jump_map = [](const StateVector&) { return StateVector{0.0, 0.0}; };
  const auto report = check_jump_structure(sys, jump_set_sampler(sys));
  CHECK(report.conditions.at("i_properness").verdict == Verdict::fail);
}

TEST_CASE("boundedness passes via a declared bounded jump set or a bounded arc") {
  SystemSpec sys = example_system();
  sys.jump_set_bounded = true;
  sys.jump_set_radius = 1.0;
  CHECK(check_boundedness(sys, nullptr, 10.0).conditions.at("iv_boundedness").verdict ==
        Verdict::pass);

  sys.jump_set_bounded = false;
  CHECK(check_boundedness(sys, nullptr, 10.0).conditions.at("iv_boundedness").verdict ==
        Verdict::unknown);

  HybridArc big = arc_from_closed_form([](double t) { return StateVector{11.0 + t, 0.0}; },
                                       [](double) { return StateVector{1.0, 0.0}; }, 0.0, 1.0, 4);
  const auto fail = check_boundedness(sys, &big, 10.0);
  CHECK(fail.conditions.at("iv_boundedness").verdict == Verdict::fail);
  CHECK(fail.conditions.at("iv_boundedness").counterexample.has_value());
}

TEST_CASE("verdicts are stable across sampler seeds") {
  const SystemSpec sys = example_system();
  CheckOptions a, b;
  a.seed = 1;
  b.seed = 999;
  a.samples = b.samples = 2000;
  const auto ra = check_jump_structure(sys, jump_set_sampler(sys), a);
  const auto rb = check_jump_structure(sys, jump_set_sampler(sys), b);
  for (const auto& [name, cond] : ra.conditions) {
    CHECK(cond.verdict == rb.conditions.at(name).verdict);
  }
}

TEST_CASE("forward lemma probe on the gravity system tracks the analytic rate") {
  // D = {x1 = 0, x2 <= -1}: a sample like (0.01, -1...) reaches the wall in
  // about 0.01 because xdot1 is close to -1.
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 1.0);
  IntegratorConfig config = default_config(2.0);
  LemmaProbeOptions options;
  options.samples_per_eps = 60;
  const LemmaProbeTable table =
      lemma_probe(ball, ProbeDirection::forward, {0.1, 0.01, 0.001}, config, options);
  REQUIRE(table.rows.size() == 3);
  double prev = 1e300;
  for (const auto& row : table.rows) {
    INFO("eps=", row.eps_in, " max_time=", row.max_mismatch_time);
    CHECK(row.reached);
    CHECK(row.max_mismatch_time < prev);
    CHECK(row.max_mismatch_time <= 5.0 * row.eps_in / 1.0);
    prev = row.max_mismatch_time;
  }
  CHECK(table.ratio_bound() <= 5.0);

  const auto row = table.rows[1];  // eps = 0.01
  CHECK(row.max_mismatch_time >= 0.001);
  CHECK(row.max_mismatch_time <= 0.05);
}

TEST_CASE("backward lemma probe reaches the jump image surface") {
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 1.0);
  IntegratorConfig config = default_config(2.0);
  LemmaProbeOptions options;
  options.samples_per_eps = 60;
  const LemmaProbeTable table =
      lemma_probe(ball, ProbeDirection::backward, {0.1, 0.01, 0.001}, config, options);
  double prev = 1e300;
  for (const auto& row : table.rows) {
    INFO("eps=", row.eps_in, " max_time=", row.max_mismatch_time);
    CHECK(row.reached);
    CHECK(row.max_mismatch_time < prev);
    prev = row.max_mismatch_time;
  }
}

TEST_CASE("lemma probe refuses when transversality does not hold") {
  ExampleParams p = zero_control_params();
  p.jump_threshold = 1e-12;
  const SystemSpec sys = build_example(p);
  CHECK_THROWS_AS(
      lemma_probe(sys, ProbeDirection::forward, {0.1, 0.01}, default_config(2.0)),
      std::invalid_argument);
}

TEST_CASE("lemma probe validates the epsilon ladder") {
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 1.0);
  CHECK_THROWS_AS(
      lemma_probe(ball, ProbeDirection::forward, {0.01, 0.1}, default_config(2.0)),
      std::invalid_argument);
}
