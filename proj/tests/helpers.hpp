#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "hybrid/arc.hpp"
#include "hybrid/integrator.hpp"
#include "hybrid/systems.hpp"

namespace test_helpers {

using namespace hybrid;

/// Arc built from a closed-form trajectory on a uniform grid; the
/// independent construction path used to cross-check simulator output and
/// to drive the closeness metrics without the integrator.
inline HybridArc arc_from_closed_form(const std::function<StateVector(double)>& state,
                                      const std::function<StateVector(double)>& deriv, double t0,
                                      double t1, int nodes) {
  HybridArc arc;
  FlowSegment seg;
  seg.j = 0;
  for (int i = 0; i <= nodes; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / nodes;
    seg.samples.push_back({t, state(t), deriv ? deriv(t) : StateVector{}});
  }
  arc.domain.segments.push_back({0, t0, t1});
  arc.segments.push_back(std::move(seg));
  arc.t_complete_up_to_horizon = true;
  return arc;
}

inline IntegratorConfig default_config(double horizon) {
  IntegratorConfig c;
  c.horizon = horizon;
  return c;
}

/// Closed form of the linear damped oscillator xddot = -k (x - offset) - c xdot
/// used as the simulator accuracy oracle (underdamped case).
struct DampedOscillator {
  double stiffness = 1.0;
  double damping = 0.02;
  double offset = 1.0;

  StateVector state(double t, const StateVector& x0) const {
    const double zeta = damping / (2.0 * std::sqrt(stiffness));
    const double wn = std::sqrt(stiffness);
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    const double a = x0[0] - offset;
    const double b = (x0[1] + zeta * wn * a) / wd;
    const double ex = std::exp(-zeta * wn * t);
    const double pos = offset + ex * (a * std::cos(wd * t) + b * std::sin(wd * t));
    const double vel = ex * ((-zeta * wn * a + b * wd) * std::cos(wd * t) -
                             (a * wd + zeta * wn * b) * std::sin(wd * t));
    return {pos, vel};
  }
};

inline ExampleParams zero_control_params() {
  ExampleParams p;
  p.forcing.kind = ForcingProfile::Kind::none;
  p.feedback_gains = {0.0, 0.0};
  return p;
}

}  // namespace test_helpers
