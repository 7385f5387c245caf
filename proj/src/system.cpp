#include "hybrid/system.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hybrid {

StateVector SystemSpec::eval_flow(double t, const StateVector& x) const {
  StateVector f = flow_field(t, x);
  require_dimension(f, dimension, name.empty() ? "flow_field" : name + ".flow_field");
  return f;
}

StateVector SystemSpec::apply_jump(const StateVector& x) const {
  StateVector y = jump_map(x);
  require_dimension(y, dimension, name.empty() ? "jump_map" : name + ".jump_map");
  return y;
}

StateVector SystemSpec::gradient_of_flow_set(const StateVector& x) const {
  if (flow_set_gradient) return flow_set_gradient(x);
  // Central finite differences as the default.
  StateVector g(x.size());
  StateVector xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = std::sqrt(2.2e-16) * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (flow_set_fn(xp) - flow_set_fn(xm)) / (xp[i] - xm[i]);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

bool SystemSpec::in_flow_set(const StateVector& x, double tol) const {
  return flow_set_fn(x) >= -tol;
}

bool SystemSpec::in_jump_set(const StateVector& x) const {
  return std::abs(jump_event_fn(x)) <= jump_tol && jump_predicate(x);
}

bool SystemSpec::in_jump_image(const StateVector& x, double tol) const {
  if (!image_event_fn) return false;
  const double tol_eff = std::max(tol, jump_tol);
  if (std::abs(image_event_fn(x)) > tol_eff) return false;
  return !image_predicate || image_predicate(x);
}

SystemValidation validate_system(const SystemSpec& system, int samples, std::uint64_t seed) {
  SystemValidation result;
  auto flag = [&result](const std::string& msg) {
    result.ok = false;
    result.violations.push_back(msg);
  };

  if (system.dimension <= 0) {
    flag("dimension must be positive");
    return result;
  }
  if (!system.flow_field || !system.flow_set_fn || !system.jump_event_fn ||
      !system.jump_predicate || !system.jump_map) {
    flag("flow_field, flow_set_fn, jump_event_fn, jump_predicate and jump_map are required");
    return result;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<StateVector> d_points;
  if (system.jump_set_param) {
    const auto& p = *system.jump_set_param;
    for (int k = 0; k < samples; ++k) {
      std::vector<double> theta(p.dim);
      for (int i = 0; i < p.dim; ++i) {
        double lo = p.lower.empty() ? -1e6 : p.lower[i];
        double hi = p.upper.empty() ? 1e6 : p.upper[i];
        if (!std::isfinite(lo)) lo = std::min(hi, 0.0) - 4.0;
        if (!std::isfinite(hi)) hi = std::max(lo, 0.0) + 4.0;
        theta[i] = lo + (hi - lo) * unit(rng);
      }
      d_points.push_back(p.point(theta));
    }
  } else {
    // Rejection sampling near the event surface in a default box.
    std::uniform_real_distribution<double> box(-4.0, 4.0);
    for (int k = 0; k < samples * 16 && static_cast<int>(d_points.size()) < samples; ++k) {
      StateVector x(system.dimension);
      for (auto& v : x) v = box(rng);
      // One Newton step onto the event surface along its gradient.
      for (int it = 0; it < 32; ++it) {
        const double e = system.jump_event_fn(x);
        if (std::abs(e) <= system.jump_tol) break;
        StateVector xp = x, xm = x;
        StateVector g(x.size());
        double gn = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
          xp[i] = x[i] + h;
          xm[i] = x[i] - h;
          g[i] = (system.jump_event_fn(xp) - system.jump_event_fn(xm)) / (2 * h);
          gn += g[i] * g[i];
          xp[i] = x[i];
          xm[i] = x[i];
        }
        if (gn < 1e-18) break;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= e * g[i] / gn;
      }
      if (system.in_jump_set(x)) d_points.push_back(x);
    }
  }

  int checked = 0;
  for (const auto& z : d_points) {
    if (!system.in_jump_set(z)) continue;
    ++checked;
    const double c = system.flow_set_fn(z);
    if (c < -1e-7) {
      flag("jump-set sample outside the flow set: flow_set_fn = " + std::to_string(c));
      break;
    }
    const StateVector g = system.jump_map(z);
    if (static_cast<int>(g.size()) != system.dimension) {
      flag("jump_map returns dimension " + std::to_string(g.size()));
      break;
    }
  }
  if (checked == 0 && !d_points.empty()) {
    flag("jump-set parameterization produced no points inside D");
  }

  StateVector probe(system.dimension, 0.5);
  const StateVector f = system.flow_field(0.0, probe);
  if (static_cast<int>(f.size()) != system.dimension) {
    flag("flow_field returns dimension " + std::to_string(f.size()));
  }
  return result;
}

}  // namespace hybrid
