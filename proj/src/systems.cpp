#include "hybrid/systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hybrid/metrics.hpp"

namespace hybrid {

namespace {

struct HermiteArc {
  double p0, m0, p1, m1, tau;

  double pos(double s) const {
    const double s2 = s * s, s3 = s2 * s;
    return p0 * (2 * s3 - 3 * s2 + 1) + tau * m0 * (s3 - 2 * s2 + s) + p1 * (-2 * s3 + 3 * s2) +
           tau * m1 * (s3 - s2);
  }
  double vel(double s) const {
    const double s2 = s * s;
    return (p0 * (6 * s2 - 6 * s) + tau * m0 * (3 * s2 - 4 * s + 1) + p1 * (6 * s - 6 * s2) +
            tau * m1 * (3 * s2 - 2 * s)) /
           tau;
  }
  double acc(double s) const {
    return (p0 * (12 * s - 6) + tau * m0 * (6 * s - 4) + p1 * (6 - 12 * s) +
            tau * m1 * (6 * s - 2)) /
           (tau * tau);
  }
};

struct BouncePhase {
  double pos, vel, acc;
};

BouncePhase bounce_state(const ForcingProfile& f, double t, double restitution) {
  const double period = f.period();
  double tm = std::fmod(t, period);
  if (tm < 0.0) tm += period;
  if (tm < f.drop_time) {
    HermiteArc drop{f.apex, 0.0, 0.0, -f.impact_speed, f.drop_time};
    const double s = tm / f.drop_time;
    return {drop.pos(s), drop.vel(s), drop.acc(s)};
  }
  HermiteArc rise{0.0, restitution * f.impact_speed, f.apex, 0.0, f.rise_time};
  const double s = (tm - f.drop_time) / f.rise_time;
  return {rise.pos(s), rise.vel(s), rise.acc(s)};
}

}  // namespace

double ForcingProfile::value(double t, double stiffness, double damping, double spring_offset,
                             double restitution) const {
  if (kind == Kind::none) return 0.0;
  const BouncePhase b = bounce_state(*this, t, restitution);
  return b.acc + stiffness * b.pos + damping * b.vel - spring_offset;
}

std::array<double, 2> ForcingProfile::designed_state(double t, double restitution) const {
  const BouncePhase b = bounce_state(*this, t, restitution);
  return {b.pos, b.vel};
}

void ExampleParams::validate() const {
  if (!(restitution > 0.0 && restitution < 1.0)) {
    throw std::invalid_argument("restitution must lie in (0, 1)");
  }
  if (!(jump_threshold > 0.0)) throw std::invalid_argument("jump_threshold must be > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(stiffness > 0.0)) throw std::invalid_argument("stiffness must be > 0");
  if (!(damping >= 0.0)) throw std::invalid_argument("damping must be >= 0");
  if (forcing.kind == ForcingProfile::Kind::designed_bounce) {
    if (!(forcing.apex > 0.0) || !(forcing.drop_time > 0.0) || !(forcing.rise_time > 0.0)) {
      throw std::invalid_argument("designed bounce forcing needs positive apex and durations");
    }
    if (!(forcing.impact_speed >= jump_threshold)) {
      throw std::invalid_argument(
          "designed bounce impact_speed must be >= jump_threshold or the orbit cannot jump");
    }
    // The designed orbit has to stay inside the flow set strictly between
    // its impacts.
    for (int i = 1; i < 400; ++i) {
      const double t = forcing.period() * static_cast<double>(i) / 400.0;
      if (std::abs(t - forcing.drop_time) < 1e-9) continue;
      if (forcing.designed_state(t, restitution)[0] <= 0.0) {
        throw std::invalid_argument(
            "designed bounce orbit leaves the flow set between impacts; adjust apex, "
            "impact_speed or the segment durations");
      }
    }
  }
}

SystemSpec build_example(const ExampleParams& params, std::shared_ptr<const HybridArc> reference) {
  params.validate();
  const double eps = params.restitution;
  const double r = params.jump_threshold;
  const double k_spring = params.stiffness;
  const double damping = params.damping;
  const double offset = params.spring_constant_k * params.unloaded_position;
  const ForcingProfile forcing = params.forcing;

  auto plant = std::make_shared<SystemSpec>();
  plant->dimension = 2;
  plant->name = "impacting_oscillator";
  plant->flow_set_fn = [](const StateVector& x) { return x[0]; };
  plant->flow_set_gradient = [](const StateVector&) { return StateVector{1.0, 0.0}; };
  plant->jump_event_fn = [](const StateVector& x) { return x[0]; };
  plant->jump_predicate = [r](const StateVector& x) { return x[1] <= -r; };
  plant->jump_map = [eps](const StateVector& x) {
    return StateVector{-eps * x[0], -eps * x[1]};
  };
  plant->image_event_fn = [](const StateVector& x) { return x[0]; };
  plant->image_predicate = [eps, r](const StateVector& x) { return x[1] >= eps * r; };
  plant->jump_set_bounded = false;

  JumpSetParameterization param;
  param.dim = 1;
  param.lower = {-std::numeric_limits<double>::infinity()};
  param.upper = {-r};
  param.point = [](const std::vector<double>& theta) { return StateVector{0.0, theta[0]}; };
  param.nearest_argmin = [r](const StateVector& x) {
    return std::vector<double>{std::min(-r, x[1])};
  };
  param.pair_argmin = [r, eps](const StateVector& d_side, const StateVector& g_side) {
    const double s = (d_side[1] - eps * g_side[1]) / (1.0 + eps * eps);
    return std::vector<double>{std::min(-r, s)};
  };
  plant->jump_set_param = param;

  plant->flow_field = [k_spring, damping, offset, forcing, eps](double t, const StateVector& x) {
    const double u_ff = forcing.value(t, k_spring, damping, offset, eps);
    return StateVector{x[1], -k_spring * x[0] - damping * x[1] + offset + u_ff};
  };

  if (!reference) return *plant;

  SystemSpec controlled = *plant;
  controlled.name = "impacting_oscillator_tracked";
  const std::array<double, 2> gains = params.feedback_gains;
  const double bound = params.feedback_bound;
  controlled.flow_field = [plant, reference, gains, bound](double t, const StateVector& x) {
    StateVector f = plant->flow_field(t, x);
    const double u_fb = feedback_control(t, x, *reference, gains, *plant, bound);
    if (u_fb != 0.0) f[1] += u_fb;
    return f;
  };
  // Transversality of a time-varying flow is probed near the reference
  // impacts (the input only enters the second flow component, so the
  // margins do not actually depend on it here).
  controlled.time_samples = {0.0};
  for (const auto& jr : reference->jumps) {
    controlled.time_samples.push_back(std::max(0.0, jr.t - 0.01));
    controlled.time_samples.push_back(jr.t);
    controlled.time_samples.push_back(std::min(reference->end_time(), jr.t + 0.01));
  }
  return controlled;
}

SystemSpec build_bouncing_ball(double gravity, double restitution, double jump_threshold) {
  if (!(gravity > 0.0)) throw std::invalid_argument("gravity must be > 0");
  if (!(restitution > 0.0 && restitution < 1.0)) {
    throw std::invalid_argument("restitution must lie in (0, 1)");
  }
  if (jump_threshold < 0.0) throw std::invalid_argument("jump_threshold must be >= 0");
  const double rho = restitution;
  const double thr = jump_threshold;

  SystemSpec s;
  s.dimension = 2;
  s.name = "bouncing_ball";
  s.flow_field = [gravity](double, const StateVector& x) {
    return StateVector{x[1], -gravity};
  };
  s.flow_set_fn = [](const StateVector& x) { return x[0]; };
  s.flow_set_gradient = [](const StateVector&) { return StateVector{1.0, 0.0}; };
  s.jump_event_fn = [](const StateVector& x) { return x[0]; };
  s.jump_predicate = [thr](const StateVector& x) { return x[1] <= -thr; };
  s.jump_map = [rho](const StateVector& x) { return StateVector{x[0], -rho * x[1]}; };
  s.image_event_fn = [](const StateVector& x) { return x[0]; };
  s.image_predicate = [rho, thr](const StateVector& x) { return x[1] >= rho * thr; };
  s.jump_set_bounded = false;

  JumpSetParameterization param;
  param.dim = 1;
  param.lower = {-std::numeric_limits<double>::infinity()};
  param.upper = {-thr};
  param.point = [](const std::vector<double>& theta) { return StateVector{0.0, theta[0]}; };
  param.nearest_argmin = [thr](const StateVector& x) {
    return std::vector<double>{std::min(-thr, x[1])};
  };
  param.pair_argmin = [thr, rho](const StateVector& d_side, const StateVector& g_side) {
    const double v = (d_side[1] - rho * g_side[1]) / (1.0 + rho * rho);
    return std::vector<double>{std::min(-thr, v)};
  };
  s.jump_set_param = param;
  return s;
}

HybridArc make_reference(const ExampleParams& params, const StateVector& x0,
                         const IntegratorConfig& config) {
  return simulate(build_example(params), x0, config);
}

double feedback_control(double t, const StateVector& x, const HybridArc& reference,
                        const std::array<double, 2>& gains, const SystemSpec& system,
                        double bound) {
  if (gains[0] == 0.0 && gains[1] == 0.0) return 0.0;
  const double t_query = std::clamp(t, reference.start_time(), reference.end_time());
  if (std::abs(t_query - t) > 1e-9) {
    throw std::out_of_range("feedback_control: t outside the reference time range");
  }
  const auto slice = reference.slice_at_time(t_query);
  if (slice.empty()) {
    throw std::out_of_range("feedback_control: t outside the reference time range");
  }

  StateVector target;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [j, ref_state] : slice) {
    const DistanceReport rep = rho_a(system, x, ref_state);
    if (rep.value >= best) continue;
    best = rep.value;
    switch (rep.branch) {
      case Branch::A00:
        target = ref_state;
        break;
      case Branch::A01:
        // x is close to the jump image of the (not yet jumped) reference.
        target = system.apply_jump(rep.witness);
        break;
      case Branch::A10:
        // x is close to D while the reference already jumped; track the
        // preimage point.
        target = rep.witness;
        break;
    }
  }
  const double u = -gains[0] * (x[0] - target[0]) - gains[1] * (x[1] - target[1]);
  return std::clamp(u, -bound, bound);
}

}  // namespace hybrid
