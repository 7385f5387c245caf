#include "hybrid/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>

namespace hybrid {

void IntegratorConfig::validate() const {
  if (!(step_min > 0.0) || !(step_min <= step_initial) || !(step_initial <= step_max)) {
    throw std::invalid_argument(
        "integrator config requires 0 < step_min <= step_initial <= step_max");
  }
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(event_tol > 0.0)) {
    throw std::invalid_argument("integrator tolerances must be positive");
  }
  if (jump_cap < 0) throw std::invalid_argument("jump_cap must be >= 0");
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

using Field = std::function<StateVector(double, const StateVector&)>;
using DenseEval = std::function<StateVector(double)>;

struct StepResult {
  bool accepted = false;
  bool finite = true;
  StateVector y_new;
  StateVector f_new;  // FSAL stage
  double error = 0.0;
};

StepResult dp_step(const Field& f, double t, const StateVector& y, const StateVector& f0, double h,
                   double rel_tol, double abs_tol) {
  const std::size_t n = y.size();
  StepResult res;
  StateVector tmp(n);

  auto stage = [&](double c, auto&& combine) -> StateVector {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * combine(i);
    return f(t + c * h, tmp);
  };

  const StateVector& k1 = f0;
  StateVector k2 = stage(C2, [&](std::size_t i) { return A21 * k1[i]; });
  StateVector k3 = stage(C3, [&](std::size_t i) { return A31 * k1[i] + A32 * k2[i]; });
  StateVector k4 =
      stage(C4, [&](std::size_t i) { return A41 * k1[i] + A42 * k2[i] + A43 * k3[i]; });
  StateVector k5 = stage(
      C5, [&](std::size_t i) { return A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]; });
  StateVector k6 = stage(1.0, [&](std::size_t i) {
    return A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i];
  });

  res.y_new.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
  }
  res.f_new = f(t + h, res.y_new);

  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                          E7 * res.f_new[i]);
    const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(res.y_new[i]));
    err += (e / sc) * (e / sc);
  }
  err = std::sqrt(err / std::max<std::size_t>(n, 1));
  if (!is_finite(res.y_new) || !is_finite(res.f_new) || !std::isfinite(err)) {
    res.finite = false;
    return res;
  }
  res.error = err;
  res.accepted = err <= 1.0;
  return res;
}

DenseEval make_hermite(double t0, StateVector x0, StateVector f0, double t1, StateVector x1,
                       StateVector f1) {
  const double h = t1 - t0;
  return [=](double t) -> StateVector {
    if (h <= 0.0) return x0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    StateVector r(x0.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = h00 * x0[i] + h10 * h * f0[i] + h01 * x1[i] + h11 * h * f1[i];
    }
    return r;
  };
}

struct Surface {
  std::function<double(const StateVector&)> value;
  std::function<bool(const StateVector&)> predicate;
};

// Bisection over [t_lo, t_hi] on the dense output, with value(dense(t_lo)) > 0
// and value(dense(t_hi)) <= 0, until the bracket is narrower than event_tol in
// time and the surface value at the returned point is within event_tol.
EventLocation bisect_surface(const Surface& surface, const DenseEval& dense, double t_lo,
                             double t_hi, double event_tol) {
  EventLocation loc;
  double lo = t_lo, hi = t_hi;
  StateVector x_hi = dense(hi);
  double best_e = std::abs(surface.value(x_hi));
  double best_t = hi;
  StateVector best_x = std::move(x_hi);
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= event_tol && best_e <= event_tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    StateVector xm = dense(mid);
    const double em = surface.value(xm);
    if (std::abs(em) < best_e) {
      best_e = std::abs(em);
      best_t = mid;
      best_x = xm;
    }
    if (em > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  loc.t_event = best_t;
  loc.x_event = std::move(best_x);
  loc.status = (!surface.predicate || surface.predicate(loc.x_event))
                   ? EventLocateStatus::located
                   : EventLocateStatus::spurious;
  return loc;
}

struct FlowProblem {
  Field field;
  Surface event_surface;
  std::function<double(const StateVector&)> flow_set;
};

FlowSegmentResult flow_core(const FlowProblem& problem, const StateVector& x0, double t0,
                            const IntegratorConfig& config) {
  FlowSegmentResult result;
  const double boundary_tol = 10.0 * config.event_tol;

  double t = t0;
  StateVector x = x0;
  StateVector f;
  try {
    f = problem.field(t, x);
  } catch (const std::exception& ex) {
    result.stop = FlowStop::failure;
    result.message = std::string("flow field evaluation failed: ") + ex.what();
    result.samples.push_back({t, x, {}});
    return result;
  }
  if (!is_finite(f)) {
    result.stop = FlowStop::failure;
    result.message = "non-finite derivative at the initial state";
    result.samples.push_back({t, x, {}});
    return result;
  }
  result.samples.push_back({t, x, f});

  const double t_end = t0 + config.horizon;
  double e_prev = problem.event_surface.value(x);
  double h = std::min(config.step_initial, config.step_max);

  auto finish = [&](const EventLocation& loc, FlowStop stop) {
    StateVector fe = problem.field(loc.t_event, loc.x_event);
    result.samples.push_back({loc.t_event, loc.x_event, std::move(fe)});
    result.stop = stop;
    result.t_event = loc.t_event;
    result.x_event = loc.x_event;
  };

  if (t >= t_end) {
    result.stop = FlowStop::horizon;
    return result;
  }

  while (true) {
    const double remaining = t_end - t;
    if (remaining <= 0.0) {
      result.stop = FlowStop::horizon;
      return result;
    }
    bool forced_final = false;
    if (h >= remaining) {
      h = remaining;
      forced_final = true;
    }

    StepResult step = dp_step(problem.field, t, x, f, h, config.rel_tol, config.abs_tol);
    if (!step.finite) {
      result.stop = FlowStop::failure;
      result.message = "non-finite state or derivative during integration";
      return result;
    }
    if (!step.accepted && !(forced_final && h <= config.step_min)) {
      if (h <= config.step_min) {
        result.stop = FlowStop::failure;
        result.message = "step size underflow at t = " + std::to_string(t);
        return result;
      }
      h = std::max(config.step_min, h * std::clamp(0.9 * std::pow(step.error, -0.2), 0.2, 1.0));
      continue;
    }

    const double t_new = t + h;
    const double e_new = problem.event_surface.value(step.y_new);
    DenseEval dense = make_hermite(t, x, f, t_new, step.y_new, step.f_new);

    // Crossing from the interior side: surface value decreasing through 0.
    double bracket_hi = 0.0;
    bool crossing = false;
    if (e_prev > 0.0 && e_new <= 0.0) {
      crossing = true;
      bracket_hi = t_new;
    } else if (e_prev > 0.0 && e_new > 0.0) {
      // Midpoint probe catches a dip through the surface inside one step.
      const double tm = t + 0.5 * h;
      if (problem.event_surface.value(dense(tm)) <= 0.0) {
        crossing = true;
        bracket_hi = tm;
      }
    }

    // Cuts the arc at the flow-set boundary; when the step already started
    // on the boundary the cut is the start itself, so the terminal sample
    // never leaves C beyond tolerance.
    auto finish_left_at_boundary = [&]() {
      EventLocation loc{EventLocateStatus::located, t, x};
      if (problem.flow_set(x) > 0.0) {
        Surface boundary{problem.flow_set, nullptr};
        loc = bisect_surface(boundary, dense, t, t_new, config.event_tol);
      }
      finish(loc, FlowStop::left_flow_set);
    };

    if (crossing) {
      EventLocation loc =
          bisect_surface(problem.event_surface, dense, t, bracket_hi, config.event_tol);
      if (loc.status == EventLocateStatus::located) {
        finish(loc, FlowStop::event);
        return result;
      }
      // Spurious contact: not an admissible jump. If the flow set is violated
      // past the crossing the arc ends at its boundary, otherwise flow
      // continues.
      if (problem.flow_set(step.y_new) < -boundary_tol) {
        finish_left_at_boundary();
        return result;
      }
    } else if (problem.flow_set(step.y_new) < -boundary_tol) {
      finish_left_at_boundary();
      return result;
    }

    t = t_new;
    x = std::move(step.y_new);
    f = std::move(step.f_new);
    e_prev = e_new;
    result.samples.push_back({t, x, f});

    if (t >= t_end) {
      result.stop = FlowStop::horizon;
      return result;
    }
    const double grow =
        step.error > 0.0 ? std::clamp(0.9 * std::pow(step.error, -0.2), 0.2, 5.0) : 5.0;
    h = std::clamp(h * grow, config.step_min, config.step_max);
  }
}

}  // namespace

EventLocation locate_event(const SystemSpec& system, const EventBracket& bracket,
                           double event_tol) {
  const double e_lo = system.jump_event_fn(bracket.x_lo);
  const double e_hi = system.jump_event_fn(bracket.x_hi);
  const bool decreasing = e_lo > 0.0 && e_hi <= 0.0;
  const bool increasing = e_lo < 0.0 && e_hi >= 0.0;
  if (!decreasing && !increasing) {
    EventLocation loc;
    loc.status = EventLocateStatus::no_sign_change;
    return loc;
  }
  StateVector f_lo = system.eval_flow(bracket.t_lo, bracket.x_lo);
  StateVector f_hi = system.eval_flow(bracket.t_hi, bracket.x_hi);
  DenseEval dense =
      make_hermite(bracket.t_lo, bracket.x_lo, f_lo, bracket.t_hi, bracket.x_hi, f_hi);
  if (decreasing) {
    Surface surf{system.jump_event_fn, system.jump_predicate};
    return bisect_surface(surf, dense, bracket.t_lo, bracket.t_hi, event_tol);
  }
  Surface mirrored{[&system](const StateVector& x) { return -system.jump_event_fn(x); },
                   system.jump_predicate};
  return bisect_surface(mirrored, dense, bracket.t_lo, bracket.t_hi, event_tol);
}

FlowSegmentResult flow_until_event(const SystemSpec& system, const StateVector& x0, double t0,
                                   const IntegratorConfig& config) {
  config.validate();
  require_dimension(x0, system.dimension, "flow_until_event x0");
  require_finite(x0, "flow_until_event x0");
  const double boundary_tol = 10.0 * config.event_tol;
  if (system.flow_set_fn(x0) < -boundary_tol) {
    throw std::invalid_argument("flow_until_event: x0 is outside the flow set (flow_set_fn = " +
                                std::to_string(system.flow_set_fn(x0)) + ")");
  }
  FlowProblem problem{
      [&system](double t, const StateVector& x) { return system.eval_flow(t, x); },
      Surface{system.jump_event_fn, system.jump_predicate},
      system.flow_set_fn,
  };
  return flow_core(problem, x0, t0, config);
}

FlowSegmentResult simulate_reversed(const SystemSpec& system, const StateVector& x0,
                                    const IntegratorConfig& config, double t0) {
  config.validate();
  require_dimension(x0, system.dimension, "simulate_reversed x0");
  require_finite(x0, "simulate_reversed x0");
  if (!system.has_image_surface()) {
    throw std::invalid_argument("simulate_reversed: system has no G(D) surface description");
  }
  const double boundary_tol = 10.0 * config.event_tol;
  if (system.flow_set_fn(x0) < -boundary_tol) {
    throw std::invalid_argument("simulate_reversed: x0 is outside the flow set");
  }
  FlowProblem problem{
      [&system, t0](double tau, const StateVector& x) {
        StateVector f = system.eval_flow(t0 - tau, x);
        for (auto& v : f) v = -v;
        return f;
      },
      Surface{system.image_event_fn, system.image_predicate},
      system.flow_set_fn,
  };
  return flow_core(problem, x0, 0.0, config);
}

HybridArc simulate(const SystemSpec& system, const StateVector& x0,
                   const IntegratorConfig& config) {
  config.validate();
  require_dimension(x0, system.dimension, "simulate x0");
  require_finite(x0, "simulate x0");
  const double boundary_tol = 10.0 * config.event_tol;
  if (system.flow_set_fn(x0) < -boundary_tol && !system.in_jump_set(x0)) {
    throw std::invalid_argument("simulate: x0 is outside C union D");
  }

  HybridArc arc;
  double t = 0.0;
  int j = 0;
  StateVector x = x0;
  std::deque<double> recent_jumps;

  auto emit_segment = [&arc](int jj, std::vector<FlowSample> samples) {
    const double t_start = samples.front().t;
    const double t_end = samples.back().t;
    arc.domain.segments.push_back({jj, t_start, t_end});
    arc.segments.push_back({jj, std::move(samples)});
  };
  auto single_sample = [&system](double tt, const StateVector& xx) {
    std::vector<FlowSample> s;
    StateVector fv = system.eval_flow(tt, xx);
    s.push_back({tt, xx, std::move(fv)});
    return s;
  };
  auto zeno_tripped = [&recent_jumps, &config](double tt) {
    while (!recent_jumps.empty() && recent_jumps.front() < tt - 1.0) recent_jumps.pop_front();
    return static_cast<double>(recent_jumps.size()) >= config.zeno_rate_cap;
  };

  bool prev_segment_instant = false;
  while (true) {
    if (system.in_jump_set(x)) {
      if (static_cast<int>(arc.jumps.size()) >= config.jump_cap || zeno_tripped(t)) {
        emit_segment(j, single_sample(t, x));
        arc.terminated_reason = TerminationReason::jump_cap;
        break;
      }
      StateVector x_plus = system.apply_jump(x);
      require_finite(x_plus, "jump_map output");
      if (prev_segment_instant && system.in_jump_set(x_plus)) {
        // Another instantaneous jump would produce two consecutive
        // zero-length segments; stop instead.
        emit_segment(j, single_sample(t, x));
        arc.terminated_reason = TerminationReason::jump_cap;
        break;
      }
      emit_segment(j, single_sample(t, x));
      prev_segment_instant = true;
      arc.jumps.push_back({t, j, x, x_plus});
      recent_jumps.push_back(t);
      j += 1;
      x = std::move(x_plus);
      continue;
    }

    IntegratorConfig segment_config = config;
    segment_config.horizon = std::max(0.0, config.horizon - t);
    FlowSegmentResult flow = flow_until_event(system, x, t, segment_config);
    const bool instant = flow.samples.size() <= 1;

    switch (flow.stop) {
      case FlowStop::event: {
        if (static_cast<int>(arc.jumps.size()) >= config.jump_cap || zeno_tripped(flow.t_event)) {
          emit_segment(j, std::move(flow.samples));
          arc.terminated_reason = TerminationReason::jump_cap;
          return arc;
        }
        StateVector x_minus = flow.x_event;
        StateVector x_plus = system.apply_jump(x_minus);
        require_finite(x_plus, "jump_map output");
        emit_segment(j, std::move(flow.samples));
        prev_segment_instant = instant;
        arc.jumps.push_back({flow.t_event, j, std::move(x_minus), x_plus});
        recent_jumps.push_back(flow.t_event);
        t = flow.t_event;
        j += 1;
        x = std::move(x_plus);
        continue;
      }
      case FlowStop::horizon:
        emit_segment(j, std::move(flow.samples));
        arc.t_complete_up_to_horizon = true;
        arc.terminated_reason = TerminationReason::horizon;
        return arc;
      case FlowStop::left_flow_set:
        emit_segment(j, std::move(flow.samples));
        arc.terminated_reason = TerminationReason::left_flow_set;
        return arc;
      case FlowStop::failure:
        emit_segment(j, std::move(flow.samples));
        arc.terminated_reason = TerminationReason::solver_failure;
        return arc;
    }
  }
  return arc;
}

}  // namespace hybrid
