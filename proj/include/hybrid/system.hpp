#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hybrid/state.hpp"

namespace hybrid {

/// Low-dimensional parameterization of the jump set D, used by the distance
/// branches and the surface samplers. point() must land on D for every
/// parameter inside [lower, upper] (entries may be +-infinity).
struct JumpSetParameterization {
  int dim = 1;
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<StateVector(const std::vector<double>&)> point;

  /// Optional exact solvers. nearest_argmin(x) minimizes ||x - point(p)||;
  /// pair_argmin(d_side, g_side) minimizes
  /// ||g_side - G(point(p))||^2 + ||d_side - point(p)||^2.
  std::function<std::vector<double>(const StateVector&)> nearest_argmin;
  std::function<std::vector<double>(const StateVector&, const StateVector&)> pair_argmin;
};

/// The hybrid system data (C, F, D, G) with level-set representations:
///   C = { x : flow_set_fn(x) >= 0 }
///   D = { x : jump_event_fn(x) == 0 and jump_predicate(x) }
/// and the optional image surface for G(D) (used by reverse-time flow and
/// by the distance branches).
struct SystemSpec {
  int dimension = 0;
  std::string name;

  std::function<StateVector(double, const StateVector&)> flow_field;
  std::function<double(const StateVector&)> flow_set_fn;
  std::function<StateVector(const StateVector&)> flow_set_gradient;  // optional
  std::function<double(const StateVector&)> jump_event_fn;
  std::function<bool(const StateVector&)> jump_predicate;
  std::function<StateVector(const StateVector&)> jump_map;

  // Level-set description of the G(D) surface, oriented like jump_event_fn
  // (positive on the approach side). Optional; required by simulate_reversed.
  std::function<double(const StateVector&)> image_event_fn;
  std::function<bool(const StateVector&)> image_predicate;

  std::optional<JumpSetParameterization> jump_set_param;

  bool jump_set_bounded = false;
  double jump_set_radius = 0.0;  // meaningful when jump_set_bounded

  double jump_tol = 1e-9;  // |jump_event_fn| tolerance for D membership

  // Times at which a time-varying flow is probed by the hypothesis checks.
  std::vector<double> time_samples{0.0};

  StateVector eval_flow(double t, const StateVector& x) const;
  StateVector apply_jump(const StateVector& x) const;
  StateVector gradient_of_flow_set(const StateVector& x) const;

  bool in_flow_set(const StateVector& x, double tol = 0.0) const;
  bool in_jump_set(const StateVector& x) const;
  bool in_jump_image(const StateVector& x, double tol = 0.0) const;
  bool has_image_surface() const { return static_cast<bool>(image_event_fn); }
};

struct SystemValidation {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Samples D and checks the structural invariants: D lies in C (up to
/// tolerance) and the flow/jump maps return vectors of the declared
/// dimension. Never throws.
SystemValidation validate_system(const SystemSpec& system, int samples = 256,
                                 std::uint64_t seed = 1);

}  // namespace hybrid
