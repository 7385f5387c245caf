#include "hybrid/arc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hybrid {

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::horizon: return "horizon";
    case TerminationReason::left_flow_set: return "left_flow_set";
    case TerminationReason::jump_cap: return "jump_cap";
    case TerminationReason::solver_failure: return "solver_failure";
  }
  return "unknown";
}

TerminationReason termination_reason_from_string(const std::string& s) {
  if (s == "horizon") return TerminationReason::horizon;
  if (s == "left_flow_set") return TerminationReason::left_flow_set;
  if (s == "jump_cap") return TerminationReason::jump_cap;
  if (s == "solver_failure") return TerminationReason::solver_failure;
  throw std::invalid_argument("unknown termination reason: " + s);
}

int HybridArc::dimension() const {
  for (const auto& seg : segments) {
    if (!seg.samples.empty()) return static_cast<int>(seg.samples.front().x.size());
  }
  return 0;
}

double HybridArc::max_norm() const {
  double m = 0.0;
  for (const auto& seg : segments) {
    for (const auto& s : seg.samples) m = std::max(m, norm(s.x));
  }
  return m;
}

namespace {

StateVector hermite(const FlowSample& a, const FlowSample& b, double t) {
  const double h = b.t - a.t;
  if (h <= 0.0) return a.x;
  const double s = (t - a.t) / h;
  if (a.dx.size() != a.x.size() || b.dx.size() != b.x.size()) {
    // Linear fallback for arcs without stored derivatives.
    StateVector r(a.x.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.x[i] + s * (b.x[i] - a.x[i]);
    return r;
  }
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  StateVector r(a.x.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = h00 * a.x[i] + h10 * h * a.dx[i] + h01 * b.x[i] + h11 * h * b.dx[i];
  }
  return r;
}

}  // namespace

StateVector HybridArc::state_at(double t, int j, double tol) const {
  const FlowSegment* seg = nullptr;
  for (const auto& s : segments) {
    if (s.j == j) {
      seg = &s;
      break;
    }
  }
  const bool in_time = seg && !seg->samples.empty() &&
                       t >= seg->samples.front().t - tol && t <= seg->samples.back().t + tol;
  if (!in_time) {
    const HybridTime near = domain.nearest(t, j);
    std::ostringstream os;
    os << "hybrid time (" << t << ", " << j << ") outside the arc domain; nearest valid is ("
       << near.t << ", " << near.j << ")";
    throw std::out_of_range(os.str());
  }
  const auto& samples = seg->samples;
  // Exact hit on a stored node returns the stored state bit-for-bit.
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const FlowSample& s, double v) { return s.t < v; });
  if (it != samples.end() && it->t == t) return it->x;
  if (it == samples.begin()) return samples.front().x;
  if (it == samples.end()) return samples.back().x;
  return hermite(*(it - 1), *it, t);
}

std::vector<std::pair<int, StateVector>> HybridArc::slice_at_time(double t, double tol) const {
  std::vector<std::pair<int, StateVector>> out;
  for (const auto& seg : segments) {
    if (seg.samples.empty()) continue;
    if (t >= seg.samples.front().t - tol && t <= seg.samples.back().t + tol) {
      out.emplace_back(seg.j, state_at(std::clamp(t, seg.samples.front().t, seg.samples.back().t), seg.j, tol));
    }
  }
  return out;
}

StateVector arc_state_at(const HybridArc& arc, double t, int j) { return arc.state_at(t, j); }

std::vector<std::pair<int, StateVector>> arc_slice_at_time(const HybridArc& arc, double t) {
  return arc.slice_at_time(t);
}

}  // namespace hybrid
