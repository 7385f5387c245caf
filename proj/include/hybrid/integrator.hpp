#pragma once

#include <string>

#include "hybrid/arc.hpp"
#include "hybrid/system.hpp"

namespace hybrid {

struct IntegratorConfig {
  double step_initial = 1e-3;
  double step_min = 1e-12;
  double step_max = 0.025;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double event_tol = 1e-10;
  int jump_cap = 1000;
  double horizon = 10.0;
  double zeno_rate_cap = 1000.0;  // jumps per unit continuous time

  void validate() const;  // throws std::invalid_argument
};

enum class FlowStop { event, horizon, left_flow_set, failure };

struct FlowSegmentResult {
  std::vector<FlowSample> samples;
  FlowStop stop = FlowStop::horizon;
  double t_event = 0.0;
  StateVector x_event;
  std::string message;
};

enum class EventLocateStatus { located, spurious, no_sign_change };

struct EventBracket {
  double t_lo = 0.0;
  StateVector x_lo;
  double t_hi = 0.0;
  StateVector x_hi;
};

struct EventLocation {
  EventLocateStatus status = EventLocateStatus::no_sign_change;
  double t_event = 0.0;
  StateVector x_event;
};

/// Refines a sign change of jump_event_fn inside a single integration step by
/// bisection on the dense-output cubic Hermite through the bracket endpoints.
/// Returns spurious when the predicate fails at the crossing, no_sign_change
/// when the bracket does not straddle the surface.
EventLocation locate_event(const SystemSpec& system, const EventBracket& bracket,
                           double event_tol = 1e-10);

/// Integrates xdot = F(t, x) inside C with adaptive Dormand-Prince 5(4),
/// monitoring jump_event_fn for a crossing from the interior side (value
/// decreasing through zero). Requires flow_set_fn(x0) >= -10 * event_tol.
FlowSegmentResult flow_until_event(const SystemSpec& system, const StateVector& x0, double t0,
                                   const IntegratorConfig& config);

/// Alternates flow and jumps x+ = G(x) starting from x0 in C union D at t = 0.
HybridArc simulate(const SystemSpec& system, const StateVector& x0,
                   const IntegratorConfig& config);

/// Integrates xdot = -F(t0 - tau, x) and stops on a crossing of the G(D)
/// surface (image_event_fn / image_predicate). Used by the backward lemma
/// probes. Sample times are the elapsed reverse time.
FlowSegmentResult simulate_reversed(const SystemSpec& system, const StateVector& x0,
                                    const IntegratorConfig& config, double t0 = 0.0);

}  // namespace hybrid
