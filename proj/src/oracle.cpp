#include "hybrid/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hybrid {

namespace {

long axis_points(double lo, double hi, double res) {
  if (hi < lo) return 0;
  return static_cast<long>(std::floor((hi - lo) / res + 1e-9)) + 1;
}

}  // namespace

RhoOracle::RhoOracle(const SystemSpec& system, GridSpec grid)
    : system_(system), grid_(std::move(grid)) {
  const int n = system_.dimension;
  if (static_cast<int>(grid_.lo.size()) != n || static_cast<int>(grid_.hi.size()) != n) {
    throw std::invalid_argument("oracle grid box dimension mismatch");
  }
  if (!(grid_.resolution > 0.0)) throw std::invalid_argument("oracle grid resolution must be > 0");
  dims_.resize(n);
  long total = 1;
  for (int i = 0; i < n; ++i) {
    dims_[i] = axis_points(grid_.lo[i], grid_.hi[i], grid_.resolution);
    if (dims_[i] <= 0) throw std::invalid_argument("oracle grid box is empty");
    total *= dims_[i];
  }

  // Enumerate the grid members of D (and of G(D) when the image surface is
  // described) once; these sets are measure zero, so the lists stay small.
  const double mtol = std::max(system_.jump_tol, grid_.resolution / 2.0);
  std::vector<long> idx(n, 0);
  StateVector z(n);
  for (long count = 0; count < total; ++count) {
    for (int i = 0; i < n; ++i) z[i] = grid_.lo[i] + static_cast<double>(idx[i]) * grid_.resolution;
    if (std::abs(system_.jump_event_fn(z)) <= mtol && system_.jump_predicate(z)) {
      d_members_.push_back(z);
      d_images_.push_back(system_.apply_jump(z));
    }
    if (system_.has_image_surface() && system_.in_jump_image(z, mtol)) {
      gd_members_.push_back(z);
    }
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < dims_[i]) break;
      idx[i] = 0;
    }
  }
}

double RhoOracle::evaluate(const StateVector& x1, const StateVector& x2) const {
  const int n = system_.dimension;
  require_dimension(x1, n, "rho_a_oracle x1");
  require_dimension(x2, n, "rho_a_oracle x2");
  const double res = grid_.resolution;
  const StateVector m = midpoint(x1, x2);
  const double half_w2 = distance_squared(x1, x2) / 2.0;

  double best = std::numeric_limits<double>::infinity();
  auto f00 = [&](const StateVector& z) {
    return std::sqrt(distance_squared(x1, z) + distance_squared(x2, z));
  };
  auto consider00 = [&](const StateVector& z) {
    const double v = f00(z);
    if (v < best) best = v;
  };

  // A00 over the D and G(D) member lists.
  for (const auto& z : d_members_) consider00(z);
  for (const auto& z : gd_members_) consider00(z);

  auto snap = [&](const StateVector& x) {
    StateVector z(n);
    for (int i = 0; i < n; ++i) {
      long k = std::lround((x[i] - grid_.lo[i]) / res);
      k = std::clamp<long>(k, 0, dims_[i] - 1);
      z[i] = grid_.lo[i] + static_cast<double>(k) * res;
    }
    return z;
  };
  for (const auto* seed : {&m, &x1, &x2}) {
    StateVector z = snap(*seed);
    if (system_.flow_set_fn(z) >= 0.0) consider00(z);
  }

  // Coarse full-box pass over C to bound the fine window.
  const long stride = std::max<long>(1, std::lround(coarse_stride_ / res));
  {
    std::vector<long> idx(n, 0);
    StateVector z(n);
    bool done = false;
    while (!done) {
      for (int i = 0; i < n; ++i) z[i] = grid_.lo[i] + static_cast<double>(idx[i]) * res;
      if (system_.flow_set_fn(z) >= 0.0) consider00(z);
      done = true;
      for (int i = n - 1; i >= 0; --i) {
        idx[i] += stride;
        if (idx[i] < dims_[i]) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
    }
  }

  // Any z with f00(z) <= best satisfies ||z - m|| <= sqrt((best^2 - w2/2)/2),
  // so the exhaustive fine pass over C can be confined to that window.
  if (std::isfinite(best)) {
    const double slack =
        std::sqrt(std::max(0.0, (best * best - half_w2) / 2.0)) + 2.0 * res * std::sqrt(n);
    std::vector<long> lo_idx(n), hi_idx(n), idx(n);
    bool empty = false;
    for (int i = 0; i < n; ++i) {
      lo_idx[i] = std::clamp<long>(
          static_cast<long>(std::floor((m[i] - slack - grid_.lo[i]) / res)), 0, dims_[i] - 1);
      hi_idx[i] = std::clamp<long>(
          static_cast<long>(std::ceil((m[i] + slack - grid_.lo[i]) / res)), 0, dims_[i] - 1);
      if (hi_idx[i] < lo_idx[i]) empty = true;
      idx[i] = lo_idx[i];
    }
    if (!empty) {
      StateVector z(n);
      bool done = false;
      while (!done) {
        for (int i = 0; i < n; ++i) z[i] = grid_.lo[i] + static_cast<double>(idx[i]) * res;
        if (system_.flow_set_fn(z) >= 0.0) consider00(z);
        done = true;
        for (int i = n - 1; i >= 0; --i) {
          if (++idx[i] <= hi_idx[i]) {
            done = false;
            break;
          }
          idx[i] = lo_idx[i];
        }
      }
    }
  }

  // A01 / A10 over the D member list.
  for (std::size_t k = 0; k < d_members_.size(); ++k) {
    const StateVector& z = d_members_[k];
    const StateVector& gz = d_images_[k];
    const double v01 = std::sqrt(distance_squared(x1, gz) + distance_squared(x2, z));
    const double v10 = std::sqrt(distance_squared(x1, z) + distance_squared(x2, gz));
    if (v01 < best) best = v01;
    if (v10 < best) best = v10;
  }

  if (!std::isfinite(best)) {
    throw std::runtime_error("rho_a_oracle: no feasible grid point inside C u D u G(D)");
  }
  return best;
}

double rho_a_oracle(const SystemSpec& system, const StateVector& x1, const StateVector& x2,
                    const GridSpec& grid) {
  return RhoOracle(system, grid).evaluate(x1, x2);
}

}  // namespace hybrid
