#pragma once

#include <string>
#include <vector>

namespace hybrid {

/// State of the continuous dynamics, dimension fixed per system.
using StateVector = std::vector<double>;

bool is_finite(const StateVector& x);

/// Sum of squared entries.
double norm_squared(const StateVector& x);

/// Euclidean norm, always computed as sqrt(norm_squared(x)) so that callers
/// comparing against squared quantities see bit-consistent values.
double norm(const StateVector& x);

StateVector subtract(const StateVector& a, const StateVector& b);
StateVector add(const StateVector& a, const StateVector& b);
StateVector scale(const StateVector& a, double s);
StateVector midpoint(const StateVector& a, const StateVector& b);

double distance_squared(const StateVector& a, const StateVector& b);
double distance(const StateVector& a, const StateVector& b);

/// Throws std::invalid_argument when x.size() != n.
void require_dimension(const StateVector& x, int n, const std::string& what);

/// Throws std::invalid_argument when x has NaN/Inf entries.
void require_finite(const StateVector& x, const std::string& what);

}  // namespace hybrid
