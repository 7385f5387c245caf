#include "hybrid/set_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hybrid {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Fixed unit-ish offset directions for the parameterization-free multistart.
const double kOffsets[8][4] = {
    {1, 0, 0, 0},   {-1, 0, 0, 0},   {0, 1, 0, 0},     {0, -1, 0, 0},
    {0.7, 0.7, 0, 0}, {-0.7, 0.7, 0, 0}, {0.7, -0.7, 0, 0}, {-0.5, -0.5, 0.5, 0.5},
};

struct Window {
  double lo;
  double hi;
};

double finite_edge(const JumpSetParameterization& p) {
  const double lo = p.lower.empty() ? -std::numeric_limits<double>::infinity() : p.lower[0];
  const double hi = p.upper.empty() ? std::numeric_limits<double>::infinity() : p.upper[0];
  if (std::isfinite(hi)) return hi;
  if (std::isfinite(lo)) return lo;
  return 0.0;
}

// Finite search window, halfwidth given in parameter units measured from the
// finite edge of the parameter range.
Window param_window(const JumpSetParameterization& p, double halfwidth) {
  double lo = p.lower.empty() ? -std::numeric_limits<double>::infinity() : p.lower[0];
  double hi = p.upper.empty() ? std::numeric_limits<double>::infinity() : p.upper[0];
  if (!std::isfinite(lo) && !std::isfinite(hi)) return {-halfwidth, halfwidth};
  if (!std::isfinite(lo)) return {hi - halfwidth, hi};
  if (!std::isfinite(hi)) return {lo, lo + halfwidth};
  return {lo, hi};
}

std::optional<SetMinimizer> minimize_over_param_1d(const SystemSpec& system,
                                                   const std::function<double(double)>& objective,
                                                   double halfwidth) {
  const auto& p = *system.jump_set_param;
  const Window win = param_window(p, halfwidth);
  if (!(win.lo <= win.hi)) return std::nullopt;
  const double arg = golden_minimize(objective, win.lo, win.hi);
  SetMinimizer out;
  out.point = p.point({arg});
  out.objective = objective(arg);
  return out;
}

// Local stretch of a parameterized curve map near the edge of the range,
// used to convert state-space reach into parameter units.
double param_slope(const JumpSetParameterization& p,
                   const std::function<StateVector(const StateVector&)>& map_point) {
  const double edge = finite_edge(p);
  const double inward = (!p.upper.empty() && std::isfinite(p.upper[0])) ? -1.0 : 1.0;
  const StateVector a = map_point ? map_point(p.point({edge})) : p.point({edge});
  const StateVector b =
      map_point ? map_point(p.point({edge + inward})) : p.point({edge + inward});
  return std::max(distance(a, b), 1e-2);
}

StateVector level_project(const SystemSpec& system, StateVector x, int max_iter = 64) {
  for (int it = 0; it < max_iter; ++it) {
    const double e = system.jump_event_fn(x);
    if (std::abs(e) <= system.jump_tol) break;
    StateVector g(x.size());
    StateVector xp = x, xm = x;
    double gn = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
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
  return x;
}

// Multi-start projected local search on {jump_event_fn = 0} with the
// predicate as a hard filter; returns the best feasible point found.
std::optional<SetMinimizer> minimize_over_level_set(
    const SystemSpec& system, const std::function<double(const StateVector&)>& objective,
    const StateVector& anchor) {
  const int n = system.dimension;
  const double scale = 1.0 + norm(anchor);
  std::optional<SetMinimizer> best;

  auto consider = [&](const StateVector& z0) {
    StateVector z = level_project(system, z0);
    if (!system.in_jump_set(z)) return;
    double val = objective(z);
    // Local pattern search constrained to the surface. A search that runs
    // out of iterations before its step collapses only provides an upper
    // bound and is reported as unconverged.
    double step = 0.25 * scale;
    int it = 0;
    for (; it < 80 && step > 1e-10; ++it) {
      bool improved = false;
      for (int i = 0; i < n; ++i) {
        for (double sgn : {1.0, -1.0}) {
          StateVector trial = z;
          trial[i] += sgn * step;
          trial = level_project(system, trial);
          if (!system.in_jump_set(trial)) continue;
          const double tv = objective(trial);
          if (tv < val) {
            val = tv;
            z = trial;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (!best || val < best->objective) {
      best = SetMinimizer{z, val, step <= 1e-8 * scale};
    }
  };

  consider(anchor);
  for (const auto& dir : kOffsets) {
    StateVector z0 = anchor;
    for (int i = 0; i < n && i < 4; ++i) z0[i] += dir[i] * scale;
    consider(z0);
  }
  return best;
}

}  // namespace

double golden_minimize(const std::function<double(double)>& f, double lo, double hi, double tol,
                       int coarse_points) {
  if (hi <= lo) return lo;
  // Coarse scan to pick the basin.
  int best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  const int m = std::max(coarse_points, 3);
  for (int i = 0; i <= m; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / m;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * static_cast<double>(std::max(0, best_i - 1)) / m;
  double b = lo + (hi - lo) * static_cast<double>(std::min(m, best_i + 1)) / m;

  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

std::optional<StateVector> project_onto_flow_boundary(const SystemSpec& system,
                                                      const StateVector& x, int max_iter) {
  StateVector z = x;
  for (int it = 0; it < max_iter; ++it) {
    const double c = system.flow_set_fn(z);
    if (std::abs(c) <= 1e-12 * (1.0 + std::abs(c))) return z;
    StateVector g = system.gradient_of_flow_set(z);
    const double gn = norm_squared(g);
    if (gn < 1e-18) return std::nullopt;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= c * g[i] / gn;
  }
  if (std::abs(system.flow_set_fn(z)) <= 1e-9) return z;
  return std::nullopt;
}

std::optional<SetMinimizer> nearest_on_jump_set(const SystemSpec& system, const StateVector& x) {
  if (system.jump_set_param) {
    const auto& p = *system.jump_set_param;
    if (p.nearest_argmin) {
      SetMinimizer out;
      out.point = p.point(p.nearest_argmin(x));
      out.objective = distance(x, out.point);
      return out;
    }
    if (p.dim == 1) {
      auto obj = [&](double arg) { return distance_squared(x, p.point({arg})); };
      // A minimizer z* satisfies ||z*|| <= ||x|| + ||x - edge point||.
      const double ub = distance(x, p.point({finite_edge(p)}));
      const double halfwidth =
          (norm(x) + ub + 1.0) / param_slope(p, nullptr) + std::abs(finite_edge(p)) + 1.0;
      auto res = minimize_over_param_1d(system, obj, halfwidth);
      if (!res) return std::nullopt;
      res->objective = std::sqrt(res->objective);
      return res;
    }
  }
  return minimize_over_level_set(
      system, [&](const StateVector& z) { return distance(x, z); }, x);
}

std::optional<SetMinimizer> nearest_on_jump_image(const SystemSpec& system, const StateVector& x) {
  if (system.jump_set_param && system.jump_set_param->dim == 1) {
    const auto& p = *system.jump_set_param;
    auto image = [&system, &p](double arg) { return system.apply_jump(p.point({arg})); };
    auto obj = [&](double arg) { return distance_squared(x, image(arg)); };
    auto map_point = [&system](const StateVector& z) { return system.apply_jump(z); };
    const double ub = distance(x, image(finite_edge(p)));
    const double halfwidth =
        (norm(x) + ub + 1.0) / param_slope(p, map_point) + std::abs(finite_edge(p)) + 1.0;
    auto res = minimize_over_param_1d(system, obj, halfwidth);
    if (!res) return std::nullopt;
    res->point = system.apply_jump(res->point);
    res->objective = std::sqrt(res->objective);
    return res;
  }
  // Without a parameterization, search the level set for the preimage.
  auto res = minimize_over_level_set(
      system, [&](const StateVector& z) { return distance(x, system.apply_jump(z)); }, x);
  if (!res) return std::nullopt;
  res->point = system.apply_jump(res->point);
  return res;
}

std::optional<SetMinimizer> minimize_pair_over_jump_set(const SystemSpec& system,
                                                        const StateVector& d_side,
                                                        const StateVector& g_side) {
  auto objective_sq = [&](const StateVector& z) {
    return distance_squared(g_side, system.apply_jump(z)) + distance_squared(d_side, z);
  };
  if (system.jump_set_param) {
    const auto& p = *system.jump_set_param;
    if (p.pair_argmin) {
      SetMinimizer out;
      out.point = p.point(p.pair_argmin(d_side, g_side));
      out.objective = std::sqrt(objective_sq(out.point));
      return out;
    }
    if (p.dim == 1) {
      auto obj = [&](double arg) { return objective_sq(p.point({arg})); };
      // The objective dominates ||d_side - z||, which bounds the minimizer.
      const double ub = std::sqrt(objective_sq(p.point({finite_edge(p)})));
      const double halfwidth =
          (norm(d_side) + ub + 1.0) / param_slope(p, nullptr) + std::abs(finite_edge(p)) + 1.0;
      auto res = minimize_over_param_1d(system, obj, halfwidth);
      if (!res) return std::nullopt;
      res->objective = std::sqrt(res->objective);
      return res;
    }
  }
  auto res = minimize_over_level_set(
      system, [&](const StateVector& z) { return std::sqrt(objective_sq(z)); }, d_side);
  return res;
}

}  // namespace hybrid
