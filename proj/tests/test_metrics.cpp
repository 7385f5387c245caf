#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "hybrid/metrics.hpp"
#include "hybrid/systems.hpp"
#include "helpers.hpp"

using namespace hybrid;
using namespace test_helpers;

namespace {

StateVector random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-0.5, 3.0);
  std::uniform_real_distribution<double> vel(-3.0, 3.0);
  return {pos(rng), vel(rng)};
}

GridSpec example_grid(double resolution) {
  return GridSpec{{-1.0, -4.0}, {3.5, 3.5}, resolution};
}

}  // namespace

TEST_CASE("rho_a of an identical pair is zero on branch A00") {
  const SystemSpec sys = build_example(zero_control_params());
  const auto rep = rho_a(sys, {1.0, 0.0}, {1.0, 0.0});
  CHECK(rep.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(rep.branch == Branch::A00);
}

TEST_CASE("rho_a of a pre/post jump pair is zero on branch A10") {
  const SystemSpec sys = build_example(zero_control_params());
  const auto rep = rho_a(sys, {0.0, -1.0}, {0.0, 0.8});
  CHECK(rep.value <= 1e-12);
  CHECK(rep.branch == Branch::A10);
  CHECK(rep.witness[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(rep.witness[1] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("rho_a of a vertical offset pair is the midpoint projection value") {
  const SystemSpec sys = build_example(zero_control_params());
  const auto rep = rho_a(sys, {1.0, 0.0}, {1.0, 0.1});
  CHECK(rep.value == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.branch == Branch::A00);
  CHECK(rep.witness[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.witness[1] == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("oracle matches the analytically forced upper bound") {
  const SystemSpec sys = build_example(zero_control_params());
  const GridSpec grid = example_grid(1e-3);
  const RhoOracle oracle(sys, grid);
  CHECK(oracle.evaluate({1.0, 0.0}, {1.0, 0.0}) <= 1e-9);

  // Witness z = (0, -1) in D gives ||(x1 - z, x2 - G(z))|| = 0.015.
  const double v = oracle.evaluate({0.01, -1.0}, {0.005, 0.81});
  CHECK(v <= 0.015 + 1e-9);
  CHECK(v >= 0.012);

  const double direct = rho_a_value(sys, {0.01, -1.0}, {0.005, 0.81});
  CHECK(std::abs(direct - v) <= 5e-3);
}

TEST_CASE("rho_a agrees with the brute-force oracle on random pairs") {
  const SystemSpec sys = build_example(zero_control_params());
  const double res = 5e-3;
  const RhoOracle oracle(sys, example_grid(res));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 150; ++i) {
    const StateVector x = random_state(rng);
    const StateVector y = random_state(rng);
    const double a = rho_a_value(sys, x, y);
    const double b = oracle.evaluate(x, y);
    INFO("pair ", i, ": x=(", x[0], ",", x[1], ") y=(", y[0], ",", y[1], ") rho=", a,
         " oracle=", b);
    CHECK(std::abs(a - b) <= 5.0 * res);
  }
}

TEST_CASE("rho_a bounds hold with zero violations") {
  const SystemSpec sys = build_example(zero_control_params());
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const StateVector x = random_state(rng);
    const StateVector y = random_state(rng);
    const auto rep = rho_a(sys, x, y);
    const double lower = std::sqrt(norm_squared(subtract(x, y)) / 2.0);
    CHECK(rep.branch_value(Branch::A00) >= lower);
    if (sys.flow_set_fn(x) >= 0.0) {
      CHECK(rep.value <= norm(subtract(x, y)));
    }
  }
}

TEST_CASE("rho_a is symmetric bit for bit and swaps the jump branches") {
  const SystemSpec sys = build_example(zero_control_params());
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    const StateVector x = random_state(rng);
    const StateVector y = random_state(rng);
    const auto ab = rho_a(sys, x, y);
    const auto ba = rho_a(sys, y, x);
    CHECK(std::memcmp(&ab.value, &ba.value, sizeof(double)) == 0);
    const double ab01 = ab.branch_value(Branch::A01);
    const double ba10 = ba.branch_value(Branch::A10);
    const double ab10 = ab.branch_value(Branch::A10);
    const double ba01 = ba.branch_value(Branch::A01);
    CHECK(std::memcmp(&ab01, &ba10, sizeof(double)) == 0);
    CHECK(std::memcmp(&ab10, &ba01, sizeof(double)) == 0);
  }
}

TEST_CASE("the jump branches are never simultaneously zero for distinct states") {
  const SystemSpec sys = build_example(zero_control_params());
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const StateVector x = random_state(rng);
    const StateVector y = random_state(rng);
    if (norm(subtract(x, y)) < 1e-6) continue;
    const auto rep = rho_a(sys, x, y);
    const bool both_zero =
        rep.branch_value(Branch::A01) <= 1e-9 && rep.branch_value(Branch::A10) <= 1e-9;
    CHECK_FALSE(both_zero);
  }
}

TEST_CASE("closed-form branch solvers agree with the generic search") {
  SystemSpec sys = build_example(zero_control_params());
  SystemSpec generic = sys;
  generic.jump_set_param->nearest_argmin = nullptr;
  generic.jump_set_param->pair_argmin = nullptr;
  std::mt19937_64 rng(19);
  for (int i = 0; i < 60; ++i) {
    const StateVector x = random_state(rng);
    const StateVector y = random_state(rng);
    const auto exact = rho_a(sys, x, y);
    const auto searched = rho_a(generic, x, y);
    for (int b = 0; b < 3; ++b) {
      CHECK(exact.branch_values[b] == doctest::Approx(searched.branch_values[b]).epsilon(1e-7));
    }
  }
}

TEST_CASE("rho_a matches the oracle under a strongly contracting jump map") {
  // Low restitution compresses G(D) towards the origin; the image-side
  // search windows must still cover the minimizers.
  const SystemSpec ball = build_bouncing_ball(1.0, 0.15, 0.5);
  const double res = 5e-3;
  const RhoOracle oracle(ball, GridSpec{{-1.0, -4.0}, {3.5, 3.5}, res});
  std::mt19937_64 rng(23);
  for (int i = 0; i < 80; ++i) {
    const StateVector x = random_state(rng);
    const StateVector y = random_state(rng);
    CHECK(std::abs(rho_a_value(ball, x, y) - oracle.evaluate(x, y)) <= 5.0 * res);
  }
}

TEST_CASE("the oracle reports an empty feasible grid") {
  const SystemSpec sys = build_example(zero_control_params());
  const RhoOracle oracle(sys, GridSpec{{-2.0, 0.0}, {-1.0, 1.0}, 1e-2});
  CHECK_THROWS_AS(oracle.evaluate({1.0, 0.0}, {1.0, 0.1}), std::runtime_error);
}

TEST_CASE("an unreachable jump set yields an unknown flag with an A00 bound") {
  SystemSpec sys = build_example(zero_control_params());
  sys.jump_set_param.reset();
  sys.jump_predicate = [](const StateVector&) { return false; };
  const auto rep = rho_a(sys, {1.0, 0.0}, {1.0, 0.1});
  CHECK(rep.unknown);
  CHECK(rep.branch == Branch::A00);
  CHECK(rep.value == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("sweep validates its tail grid") {
  ExampleParams p = zero_control_params();
  const IntegratorConfig config = default_config(2.0);
  auto ref = std::make_shared<HybridArc>(make_reference(p, {1.5, 0.0}, config));
  const SystemSpec sys = build_example(p, ref);
  CHECK_THROWS_AS(stability_sweep(sys, *ref, {0.01}, 1, {1.0, 0.5}, config),
                  std::invalid_argument);
}

TEST_CASE("graphical_eps of an arc with itself is zero") {
  auto arc = arc_from_closed_form([](double t) { return StateVector{t, 2.0 * t}; },
                                  [](double) { return StateVector{1.0, 2.0}; }, 0.0, 1.0, 50);
  const auto rep = graphical_eps(arc, arc);
  CHECK(rep.epsilon <= 1e-12);
}

TEST_CASE("graphical_eps of shifted drift arcs is the boundary-capped shift") {
  // xdot = 1 from 0 and from 0.05 over [0, 1]: interior samples trade the
  // time shift against the state gap, the boundary caps the value at 0.05.
  auto a = arc_from_closed_form([](double t) { return StateVector{t}; },
                                [](double) { return StateVector{1.0}; }, 0.0, 1.0, 100);
  auto b = arc_from_closed_form([](double t) { return StateVector{0.05 + t}; },
                                [](double) { return StateVector{1.0}; }, 0.0, 1.0, 100);
  const auto rep = graphical_eps(a, b);
  CHECK(rep.epsilon == doctest::Approx(0.05).epsilon(2e-2));
  const auto swapped = graphical_eps(b, a);
  CHECK(std::memcmp(&rep.epsilon, &swapped.epsilon, sizeof(double)) == 0);
}

TEST_CASE("rho_eps of an arc with itself is zero and validates T") {
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 0.0);
  const HybridArc arc = simulate(ball, {1.0, 0.0}, default_config(3.0));
  CHECK(rho_eps(arc, arc, ball).epsilon <= 1e-12);
  CHECK_THROWS_AS(rho_eps(arc, arc, ball, 100.0), std::invalid_argument);
}

TEST_CASE("closeness rejects arcs with disjoint time ranges") {
  auto a = arc_from_closed_form([](double t) { return StateVector{t}; },
                                [](double) { return StateVector{1.0}; }, 0.0, 1.0, 10);
  HybridArc b = a;
  for (auto& seg : b.segments) {
    for (auto& s : seg.samples) s.t += 5.0;
  }
  b.domain.segments[0].t_start += 5.0;
  b.domain.segments[0].t_end += 5.0;
  CHECK_THROWS_AS(graphical_eps(a, b), std::invalid_argument);
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 0.0);
  CHECK_THROWS_AS(rho_eps(a, b, ball), std::invalid_argument);
}

TEST_CASE("bouncing arcs peak in the Euclidean sense but not graphically") {
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 0.0);
  const IntegratorConfig config = default_config(3.0);
  const HybridArc a = simulate(ball, {1.0, 0.0}, config);
  const HybridArc b = simulate(ball, {1.02, 0.0}, config);
  REQUIRE(a.jumps.size() >= 1);
  REQUIRE(b.jumps.size() >= 1);

  const double euclid = equal_time_euclidean_sup(a, b).value;
  const double graphical = graphical_eps(a, b).epsilon;
  const double rho = rho_eps(a, b, ball).epsilon;
  INFO("euclid=", euclid, " graphical=", graphical, " rho=", rho);
  CHECK(euclid >= 3.0 * graphical);
  CHECK(euclid >= 3.0 * rho);
}

TEST_CASE("rho trace stays below the equal-time Euclidean mismatch pointwise") {
  const SystemSpec ball = build_bouncing_ball(1.0, 0.5, 0.0);
  const IntegratorConfig config = default_config(3.0);
  const HybridArc a = simulate(ball, {1.0, 0.0}, config);
  const HybridArc b = simulate(ball, {1.02, 0.0}, config);
  const auto trace = rho_trace(a, b, ball, 5e-3);
  for (const auto& [t, v] : trace) {
    const auto sa = a.slice_at_time(t);
    const auto sb = b.slice_at_time(t);
    double euclid_min = 1e300;
    for (const auto& [ja, xa] : sa) {
      for (const auto& [jb, xb] : sb) euclid_min = std::min(euclid_min, distance(xa, xb));
    }
    CHECK(v <= euclid_min + 1e-9);
  }
}

TEST_CASE("stability sweep at radius zero measures zero epsilon") {
  ExampleParams p = zero_control_params();
  const IntegratorConfig config = default_config(4.0);
  auto ref = std::make_shared<HybridArc>(make_reference(p, {1.5, 0.0}, config));
  const SystemSpec sys = build_example(p, ref);
  const StabilityReport rep = stability_sweep(sys, *ref, {0.0}, 2, {0.0, 2.0}, config);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].graphical <= 1e-9);
  CHECK(rep.rows[0].rho <= 1e-9);
  CHECK(rep.rows[0].failures == 0);
}

TEST_CASE("stabilizing feedback gives a monotone sweep, flipped gains do not decay") {
  ExampleParams p;  // default designed-bounce forcing, gains (2, 2)
  IntegratorConfig config = default_config(6.0);
  auto ref = std::make_shared<HybridArc>(make_reference(p, {2.0, 0.0}, config));
  REQUIRE(ref->jumps.size() >= 1);

  const SystemSpec controlled = build_example(p, ref);
  SweepOptions options;
  options.grid = 2e-3;
  const StabilityReport good =
      stability_sweep(controlled, *ref, {0.08, 0.02}, 3, {0.0, 3.0, 4.5}, config, options);
  CHECK(good.monotone_in_delta);
  CHECK(good.decaying_tail);

  ExampleParams bad = p;
  bad.feedback_gains = {-2.0, -2.0};
  const SystemSpec destabilized = build_example(bad, ref);
  const StabilityReport flipped =
      stability_sweep(destabilized, *ref, {0.05}, 2, {0.0, 3.0, 4.5}, config, options);
  CHECK_FALSE(flipped.decaying_tail);
}
