#pragma once

#include <functional>
#include <optional>

#include "hybrid/system.hpp"

namespace hybrid {

/// Result of a constrained nearest-point / branch minimization.
struct SetMinimizer {
  StateVector point;       // the witness z on the constraint set
  double objective = 0.0;  // minimized objective value (not squared)
  bool converged = true;
};

/// Golden-section refinement after a coarse scan; f need not be globally
/// unimodal, the scan picks the basin.
double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-12, int coarse_points = 128);

/// Projects x onto the boundary {flow_set_fn = 0} by damped Newton along the
/// gradient. Exact for affine level functions.
std::optional<StateVector> project_onto_flow_boundary(const SystemSpec& system,
                                                      const StateVector& x, int max_iter = 64);

/// min over z in D of ||x - z||. Uses the jump-set parameterization when
/// available, otherwise multi-start projected local search on the level set.
std::optional<SetMinimizer> nearest_on_jump_set(const SystemSpec& system, const StateVector& x);

/// min over z in D of ||x - G(z)|| (the point returned is G(z)).
std::optional<SetMinimizer> nearest_on_jump_image(const SystemSpec& system, const StateVector& x);

/// min over z in D of sqrt(||g_side - G(z)||^2 + ||d_side - z||^2); the
/// witness is z. Argument order is significant and kept caller-consistent so
/// that swapped-argument distance queries are bit-symmetric.
std::optional<SetMinimizer> minimize_pair_over_jump_set(const SystemSpec& system,
                                                        const StateVector& d_side,
                                                        const StateVector& g_side);

}  // namespace hybrid
