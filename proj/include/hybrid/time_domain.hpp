#pragma once

#include <string>
#include <vector>

namespace hybrid {

/// A point (t, j) of a hybrid time domain: continuous time t and jump count j.
struct HybridTime {
  double t = 0.0;
  int j = 0;
};

/// One interval [t_start, t_end] x {j}. Zero length is allowed (a jump with
/// no intervening flow).
struct DomainSegment {
  int j = 0;
  double t_start = 0.0;
  double t_end = 0.0;
};

struct DomainValidation {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Union of intervals [t_j, t_{j+1}] x {j} with consecutive j starting at 0
/// and continuous t across jumps.
struct HybridTimeDomain {
  std::vector<DomainSegment> segments;

  bool empty() const { return segments.empty(); }
  double start_time() const;
  double end_time() const;
  int last_j() const;

  /// True when (t, j) lies in some segment, within +-tol in t.
  bool contains(double t, int j, double tol = 1e-9) const;

  /// Closest domain point to the query, used for error messages.
  HybridTime nearest(double t, int j) const;
};

/// Structural validation; never throws, malformed input yields violations.
DomainValidation validate_domain(const HybridTimeDomain& domain);

}  // namespace hybrid
