#include "hybrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hybrid {

namespace {

struct SampledPoint {
  double t;
  int j;
  StateVector x;
};

// Dense discretization of the arc: grid points of each segment plus every
// stored node (jump instants are segment endpoints, so both sides of a jump
// are present). Ordered by time.
std::vector<SampledPoint> densify(const HybridArc& arc, double grid) {
  std::vector<SampledPoint> out;
  for (const auto& seg : arc.segments) {
    if (seg.samples.empty()) continue;
    const double t0 = seg.samples.front().t;
    const double t1 = seg.samples.back().t;
    std::vector<double> times;
    for (const auto& s : seg.samples) times.push_back(s.t);
    if (grid > 0.0) {
      for (double t = t0 + grid; t < t1; t += grid) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (double t : times) out.push_back({t, seg.j, arc.state_at(t, seg.j)});
  }
  return out;
}

std::vector<double> jump_times(const HybridArc& arc) {
  std::vector<double> ts;
  for (const auto& j : arc.jumps) ts.push_back(j.t);
  return ts;
}

double auto_window(const HybridArc& a, const HybridArc& b, double grid) {
  const auto ja = jump_times(a);
  const auto jb = jump_times(b);
  const std::size_t k = std::min(ja.size(), jb.size());
  if (k == 0) return 1.0;
  double mismatch = 0.0;
  for (std::size_t i = 0; i < k; ++i) mismatch = std::max(mismatch, std::abs(ja[i] - jb[i]));
  return std::max(10.0 * mismatch, 10.0 * grid);
}

void require_overlap(const HybridArc& a, const HybridArc& b) {
  if (a.segments.empty() || b.segments.empty() ||
      a.end_time() < b.start_time() || b.end_time() < a.start_time()) {
    throw std::invalid_argument("closeness: arcs have disjoint time ranges");
  }
}

// min over candidates q of max(|t - q.t|, ||x - q.x||), expanding outward
// from the nearest time; |dt| grows monotonically outward, so the scan stops
// once it exceeds the best value found.
EnvelopeEntry pointwise_min(const SampledPoint& p, const std::vector<SampledPoint>& dense,
                            double window) {
  EnvelopeEntry entry{p.t, p.j, std::numeric_limits<double>::infinity(), p.t, p.j};
  auto it = std::lower_bound(dense.begin(), dense.end(), p.t,
                             [](const SampledPoint& q, double v) { return q.t < v; });
  long right = it - dense.begin();
  long left = right - 1;
  auto consider = [&](long k) {
    const auto& q = dense[k];
    const double dt = std::abs(p.t - q.t);
    const double v = std::max(dt, distance(p.x, q.x));
    if (v < entry.value) {
      entry.value = v;
      entry.t_other = q.t;
      entry.j_other = q.j;
    }
  };
  while (left >= 0 || right < static_cast<long>(dense.size())) {
    const double dt_left = left >= 0 ? p.t - dense[left].t : std::numeric_limits<double>::infinity();
    const double dt_right = right < static_cast<long>(dense.size())
                                ? dense[right].t - p.t
                                : std::numeric_limits<double>::infinity();
    const double dt = std::min(dt_left, dt_right);
    if (dt >= entry.value && std::isfinite(entry.value)) break;
    if (dt > window && std::isfinite(entry.value)) break;
    if (dt_left <= dt_right) {
      consider(left--);
    } else {
      consider(right++);
    }
  }
  if (!std::isfinite(entry.value)) {
    // No candidate within the window: fall back to the nearest endpoint so
    // the mismatch is reported honestly instead of dropped.
    const auto& q = std::abs(dense.front().t - p.t) < std::abs(dense.back().t - p.t)
                        ? dense.front()
                        : dense.back();
    entry.value = std::max(std::abs(p.t - q.t), distance(p.x, q.x));
    entry.t_other = q.t;
    entry.j_other = q.j;
  }
  return entry;
}

Envelope one_direction(const std::vector<SampledPoint>& from, const std::vector<SampledPoint>& to,
                       double window) {
  Envelope env;
  env.reserve(from.size());
  for (const auto& p : from) env.push_back(pointwise_min(p, to, window));
  return env;
}

double suffix_max(const Envelope& env, double tail_start, const EnvelopeEntry** worst) {
  double m = 0.0;
  for (const auto& e : env) {
    if (e.t < tail_start) continue;
    if (e.value > m) {
      m = e.value;
      if (worst) *worst = &e;
    }
  }
  return m;
}

std::vector<double> union_times(const HybridArc& a, const HybridArc& b, double t_lo, double t_hi,
                                double grid = 0.0) {
  std::vector<double> ts;
  auto collect = [&](const HybridArc& arc) {
    for (const auto& seg : arc.segments) {
      for (const auto& s : seg.samples) {
        if (s.t >= t_lo && s.t <= t_hi) ts.push_back(s.t);
      }
    }
    for (const auto& j : arc.jumps) {
      if (j.t >= t_lo && j.t <= t_hi) ts.push_back(j.t);
    }
  };
  collect(a);
  collect(b);
  if (grid > 0.0) {
    for (double t = t_lo; t < t_hi; t += grid) ts.push_back(t);
    ts.push_back(t_hi);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

}  // namespace

ClosenessReport ClosenessProfile::report(double tail_start) const {
  double t_max = -std::numeric_limits<double>::infinity();
  for (const auto& e : forward) t_max = std::max(t_max, e.t);
  double t_max_b = -std::numeric_limits<double>::infinity();
  for (const auto& e : backward) t_max_b = std::max(t_max_b, e.t);
  if (tail_start > t_max + 1e-9 || tail_start > t_max_b + 1e-9) {
    throw std::invalid_argument("closeness: tail start T is beyond an arc horizon");
  }
  ClosenessReport rep;
  rep.tail_start = tail_start;
  rep.truncated = truncated;
  const EnvelopeEntry* worst_f = nullptr;
  const EnvelopeEntry* worst_b = nullptr;
  rep.direction_forward = suffix_max(forward, tail_start, &worst_f);
  rep.direction_backward = suffix_max(backward, tail_start, &worst_b);
  rep.epsilon = std::max(rep.direction_forward, rep.direction_backward);
  const EnvelopeEntry* worst =
      rep.direction_forward >= rep.direction_backward ? worst_f : worst_b;
  if (worst) {
    rep.worst_witness = {worst->t, worst->j, worst->t_other, worst->j_other, worst->value};
  }
  return rep;
}

ClosenessProfile graphical_closeness_profile(const HybridArc& a, const HybridArc& b,
                                             double search_window, double grid) {
  require_overlap(a, b);
  if (search_window <= 0.0) search_window = auto_window(a, b, grid);
  const auto dense_a = densify(a, grid);
  const auto dense_b = densify(b, grid);
  if (dense_a.empty() || dense_b.empty()) {
    throw std::invalid_argument("closeness: an arc has no samples");
  }
  ClosenessProfile profile;
  profile.forward = one_direction(dense_a, dense_b, search_window);
  profile.backward = one_direction(dense_b, dense_a, search_window);
  profile.truncated = std::abs(a.end_time() - b.end_time()) > 1e-9 ||
                      std::abs(a.start_time() - b.start_time()) > 1e-9;
  return profile;
}

ClosenessProfile rho_closeness_profile(const HybridArc& a, const HybridArc& b,
                                       const SystemSpec& system) {
  require_overlap(a, b);
  const double t_lo = std::max(a.start_time(), b.start_time());
  const double t_hi = std::min(a.end_time(), b.end_time());
  ClosenessProfile profile;
  profile.truncated = std::abs(a.end_time() - b.end_time()) > 1e-9 ||
                      std::abs(a.start_time() - b.start_time()) > 1e-9;
  const auto times = union_times(a, b, t_lo, t_hi);
  for (double t : times) {
    const auto slice_a = a.slice_at_time(t);
    const auto slice_b = b.slice_at_time(t);
    if (slice_a.empty() || slice_b.empty()) continue;
    for (const auto& [j, xa] : slice_a) {
      EnvelopeEntry entry{t, j, std::numeric_limits<double>::infinity(), t, 0};
      for (const auto& [jb, xb] : slice_b) {
        const double v = rho_a_value(system, xa, xb);
        if (v < entry.value) {
          entry.value = v;
          entry.j_other = jb;
        }
      }
      profile.forward.push_back(entry);
    }
    for (const auto& [jb, xb] : slice_b) {
      EnvelopeEntry entry{t, jb, std::numeric_limits<double>::infinity(), t, 0};
      for (const auto& [j, xa] : slice_a) {
        const double v = rho_a_value(system, xa, xb);
        if (v < entry.value) {
          entry.value = v;
          entry.j_other = j;
        }
      }
      profile.backward.push_back(entry);
    }
  }
  return profile;
}

ClosenessReport graphical_eps(const HybridArc& a, const HybridArc& b, double tail_start,
                              double search_window, double grid) {
  return graphical_closeness_profile(a, b, search_window, grid).report(tail_start);
}

ClosenessReport rho_eps(const HybridArc& a, const HybridArc& b, const SystemSpec& system,
                        double tail_start) {
  return rho_closeness_profile(a, b, system).report(tail_start);
}

ClosenessWitness equal_time_euclidean_sup(const HybridArc& a, const HybridArc& b, double grid,
                                          double t_lo_wanted, double t_hi_wanted) {
  require_overlap(a, b);
  const double t_lo = std::max({a.start_time(), b.start_time(), t_lo_wanted});
  const double t_hi = std::min({a.end_time(), b.end_time(), t_hi_wanted});
  ClosenessWitness worst;
  for (double t : union_times(a, b, t_lo, t_hi, grid)) {
    const auto slice_a = a.slice_at_time(t);
    const auto slice_b = b.slice_at_time(t);
    if (slice_a.empty() || slice_b.empty()) continue;
    double v = std::numeric_limits<double>::infinity();
    int ja = 0, jb = 0;
    for (const auto& [j1, xa] : slice_a) {
      for (const auto& [j2, xb] : slice_b) {
        const double d = distance(xa, xb);
        if (d < v) {
          v = d;
          ja = j1;
          jb = j2;
        }
      }
    }
    if (v > worst.value) {
      worst = {t, ja, t, jb, v};
    }
  }
  return worst;
}

std::vector<std::pair<double, double>> rho_trace(const HybridArc& a, const HybridArc& b,
                                                 const SystemSpec& system, double grid) {
  require_overlap(a, b);
  const double t_lo = std::max(a.start_time(), b.start_time());
  const double t_hi = std::min(a.end_time(), b.end_time());
  std::vector<std::pair<double, double>> trace;
  for (double t : union_times(a, b, t_lo, t_hi, grid)) {
    const auto slice_a = a.slice_at_time(t);
    const auto slice_b = b.slice_at_time(t);
    if (slice_a.empty() || slice_b.empty()) continue;
    double worst = 0.0;
    for (const auto& [j, xa] : slice_a) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& [jb, xb] : slice_b) m = std::min(m, rho_a_value(system, xa, xb));
      worst = std::max(worst, m);
    }
    trace.emplace_back(t, worst);
  }
  return trace;
}

}  // namespace hybrid
