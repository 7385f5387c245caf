#pragma once

#include <array>
#include <memory>

#include "hybrid/arc.hpp"
#include "hybrid/integrator.hpp"
#include "hybrid/system.hpp"

namespace hybrid {

/// Periodic feedforward for the impacting oscillator, built by inverse
/// dynamics from a designed bounce orbit: a cubic-Hermite drop from the apex
/// (apex, 0) to the wall at impact speed, a jump, and a cubic-Hermite rise
/// back to the apex. The orbit is an exact periodic solution of the hybrid
/// system, so a reference simulated from (apex, 0) under this forcing is
/// t-complete with impacts at drop_time + k * period.
struct ForcingProfile {
  enum class Kind { none, designed_bounce };
  Kind kind = Kind::designed_bounce;
  double apex = 2.0;
  double impact_speed = 1.0;
  double drop_time = 3.0;
  double rise_time = 3.0;

  double period() const { return drop_time + rise_time; }
  /// u_ff(t); zero for Kind::none.
  double value(double t, double stiffness, double damping, double spring_offset,
               double restitution) const;
  /// The designed orbit state (position, velocity) at time t; valid for
  /// Kind::designed_bounce.
  std::array<double, 2> designed_state(double t, double restitution) const;
};

/// Parameters of the impacting mass-spring-damper example.
struct ExampleParams {
  double damping = 0.02;
  double stiffness = 1.0;
  double unloaded_position = 1.0;
  double spring_constant_k = 1.0;
  double restitution = 0.8;       // epsilon in x+ = -epsilon x
  double jump_threshold = 0.5;    // r in z2 <= -r
  std::array<double, 2> feedback_gains{2.0, 2.0};
  double feedback_bound = 100.0;
  double horizon = 20.0;
  ForcingProfile forcing;

  void validate() const;  // throws std::invalid_argument
};

/// The impacting oscillator as a SystemSpec. When a reference arc is given
/// the flow field includes the jump-aware tracking feedback around it.
SystemSpec build_example(const ExampleParams& params,
                         std::shared_ptr<const HybridArc> reference = nullptr);

/// Ball under constant gravity bouncing on the floor x1 = 0; the classic
/// testbed for event accuracy. D = {x1 = 0, x2 <= -jump_threshold},
/// G(x) = (x1, -restitution * x2).
SystemSpec build_bouncing_ball(double gravity = 1.0, double restitution = 0.5,
                               double jump_threshold = 0.0);

/// Simulates the example without feedback from x0; the result is the
/// reference the tracking runs compare against.
HybridArc make_reference(const ExampleParams& params, const StateVector& x0,
                         const IntegratorConfig& config);

/// Jump-aware proportional tracking input. The comparison target is chosen
/// among the reference state, its jump image and its jump preimage by the
/// minimal rho_A branch against x, which keeps the error signal free of the
/// jump-time-mismatch peak.
double feedback_control(double t, const StateVector& x, const HybridArc& reference,
                        const std::array<double, 2>& gains, const SystemSpec& system,
                        double bound = 100.0);

}  // namespace hybrid
