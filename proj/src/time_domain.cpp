#include "hybrid/time_domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hybrid {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

double HybridTimeDomain::start_time() const {
  return segments.empty() ? 0.0 : segments.front().t_start;
}

double HybridTimeDomain::end_time() const {
  return segments.empty() ? 0.0 : segments.back().t_end;
}

int HybridTimeDomain::last_j() const {
  return segments.empty() ? -1 : segments.back().j;
}

bool HybridTimeDomain::contains(double t, int j, double tol) const {
  for (const auto& s : segments) {
    if (s.j == j) return t >= s.t_start - tol && t <= s.t_end + tol;
  }
  return false;
}

HybridTime HybridTimeDomain::nearest(double t, int j) const {
  HybridTime best{0.0, 0};
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) {
    const double tc = std::clamp(t, s.t_start, s.t_end);
    const double cost = std::abs(t - tc) + std::abs(j - s.j);
    if (cost < best_cost) {
      best_cost = cost;
      best = {tc, s.j};
    }
  }
  return best;
}

DomainValidation validate_domain(const HybridTimeDomain& domain) {
  DomainValidation result;
  auto flag = [&result](const std::string& msg) {
    result.ok = false;
    result.violations.push_back(msg);
  };

  const auto& segs = domain.segments;
  if (segs.empty()) {
    flag("domain has no segments");
    return result;
  }
  if (segs.front().j != 0) {
    flag("segment 0 must carry jump index 0, found " + std::to_string(segs.front().j));
  }
  if (segs.front().t_start != 0.0) {
    flag("segment 0 must start at 0, found " + fmt(segs.front().t_start));
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (s.t_end < s.t_start) {
      flag("segment " + std::to_string(i) + " has t_end " + fmt(s.t_end) +
           " before t_start " + fmt(s.t_start));
    }
    if (i > 0) {
      const auto& p = segs[i - 1];
      if (s.j != p.j + 1) {
        flag("segment " + std::to_string(i) + " must carry jump index " +
             std::to_string(p.j + 1) + ", found " + std::to_string(s.j));
      }
      if (s.t_start != p.t_end) {
        flag("segment " + std::to_string(i) + " must start at " + fmt(p.t_end) +
             ", found " + fmt(s.t_start));
      }
    }
  }
  return result;
}

}  // namespace hybrid
