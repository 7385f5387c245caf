#include "hybrid/state.hpp"

#include <cmath>
#include <stdexcept>

namespace hybrid {

bool is_finite(const StateVector& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double norm_squared(const StateVector& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double norm(const StateVector& x) { return std::sqrt(norm_squared(x)); }

StateVector subtract(const StateVector& a, const StateVector& b) {
  StateVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

StateVector add(const StateVector& a, const StateVector& b) {
  StateVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

StateVector scale(const StateVector& a, double s) {
  StateVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

StateVector midpoint(const StateVector& a, const StateVector& b) {
  StateVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + b[i]) / 2.0;
  return r;
}

double distance_squared(const StateVector& a, const StateVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const StateVector& a, const StateVector& b) {
  return std::sqrt(distance_squared(a, b));
}

void require_dimension(const StateVector& x, int n, const std::string& what) {
  if (static_cast<int>(x.size()) != n) {
    throw std::invalid_argument(what + ": expected dimension " + std::to_string(n) +
                                ", got " + std::to_string(x.size()));
  }
}

void require_finite(const StateVector& x, const std::string& what) {
  if (!is_finite(x)) {
    throw std::invalid_argument(what + ": state has non-finite entries");
  }
}

}  // namespace hybrid
