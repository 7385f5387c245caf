#include "hybrid/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hybrid/set_geometry.hpp"

namespace hybrid {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

const char* to_string(ProbeDirection d) {
  return d == ProbeDirection::forward ? "forward" : "backward";
}

bool HypothesisReport::all_pass() const {
  for (const auto& [name, cond] : conditions) {
    if (cond.verdict != Verdict::pass) return false;
  }
  return !conditions.empty();
}

void HypothesisReport::merge(const HypothesisReport& other) {
  for (const auto& [name, cond] : other.conditions) conditions[name] = cond;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double param_upper(const JumpSetParameterization& p) {
  return p.upper.empty() ? kInf : p.upper[0];
}
double param_lower(const JumpSetParameterization& p) {
  return p.lower.empty() ? -kInf : p.lower[0];
}

// Parameter value whose surface point lies `offset` away (in state space)
// from the point at parameter `edge`, stepping towards `inward_sign`.
double offset_param(const JumpSetParameterization& p,
                    const std::function<StateVector(const StateVector&)>& map_point, double edge,
                    double inward_sign, double offset) {
  if (offset <= 0.0) return edge;
  auto image = [&](double s) {
    StateVector z = p.point({s});
    return map_point ? map_point(z) : z;
  };
  const StateVector y0 = image(edge);
  double step = std::max(offset, 1e-6);
  double s = edge;
  for (int it = 0; it < 200; ++it) {
    const double trial = edge + inward_sign * step;
    if (distance(image(trial), y0) >= offset) {
      // Bisect between s and trial.
      double lo = s, hi = trial;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (distance(image(mid), y0) >= offset) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return hi;
    }
    s = trial;
    step *= 2.0;
  }
  return s;
}

SurfaceSampler make_param_sampler(const SystemSpec& system,
                                  const std::function<StateVector(const StateVector&)>& map_point,
                                  double span, double interior_offset) {
  const auto& p = *system.jump_set_param;
  const double lo = param_lower(p);
  const double hi = param_upper(p);
  double a, b;
  if (std::isfinite(hi) && !std::isfinite(lo)) {
    const double edge = offset_param(p, map_point, hi, -1.0, interior_offset);
    b = edge;
    a = edge - span;
  } else if (std::isfinite(lo) && !std::isfinite(hi)) {
    const double edge = offset_param(p, map_point, lo, 1.0, interior_offset);
    a = edge;
    b = edge + span;
  } else if (std::isfinite(lo) && std::isfinite(hi)) {
    a = offset_param(p, map_point, lo, 1.0, interior_offset);
    b = offset_param(p, map_point, hi, -1.0, interior_offset);
    if (a > b) a = b = 0.5 * (lo + hi);
  } else {
    a = -span;
    b = span;
  }

  SurfaceSampler sampler;
  auto lift = [&system, map_point](const std::vector<double>& theta) {
    StateVector z = system.jump_set_param->point(theta);
    return map_point ? map_point(z) : z;
  };
  sampler.fixed.push_back(lift({b}));
  sampler.fixed.push_back(lift({a}));
  sampler.draw = [a, b, lift](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(a, b);
    return lift({u(rng)});
  };
  return sampler;
}

SurfaceSampler make_rejection_sampler(const SystemSpec& system, double span,
                                      bool image_surface) {
  SurfaceSampler sampler;
  sampler.draw = [&system, span, image_surface](std::mt19937_64& rng) -> StateVector {
    std::uniform_real_distribution<double> box(-span, span);
    StateVector x(system.dimension);
    for (auto& v : x) v = box(rng);
    // Project onto the surface along the finite-difference gradient.
    auto surface = image_surface ? system.image_event_fn : system.jump_event_fn;
    for (int it = 0; it < 48; ++it) {
      const double e = surface(x);
      if (std::abs(e) <= system.jump_tol) break;
      StateVector g(x.size());
      double gn = 0.0;
      StateVector xp = x, xm = x;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (surface(xp) - surface(xm)) / (2 * h);
        gn += g[i] * g[i];
        xp[i] = x[i];
        xm[i] = x[i];
      }
      if (gn < 1e-18) break;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= e * g[i] / gn;
    }
    const bool ok = image_surface ? system.in_jump_image(x) : system.in_jump_set(x);
    return ok ? x : StateVector{};
  };
  return sampler;
}

std::vector<StateVector> collect_samples(const SurfaceSampler& sampler, long n,
                                         std::uint64_t seed) {
  std::vector<StateVector> points = sampler.fixed;
  std::mt19937_64 rng(seed);
  long attempts = 0;
  while (static_cast<long>(points.size()) < n && attempts < 20 * n) {
    ++attempts;
    StateVector z = sampler.draw(rng);
    if (!z.empty()) points.push_back(std::move(z));
  }
  return points;
}

}  // namespace

SurfaceSampler jump_set_sampler(const SystemSpec& system, double span, double interior_offset) {
  if (system.jump_set_param && system.jump_set_param->dim == 1) {
    return make_param_sampler(system, nullptr, span, interior_offset);
  }
  return make_rejection_sampler(system, span, false);
}

SurfaceSampler jump_image_sampler(const SystemSpec& system, double span, double interior_offset) {
  if (system.jump_set_param && system.jump_set_param->dim == 1) {
    auto map_point = [&system](const StateVector& z) { return system.apply_jump(z); };
    return make_param_sampler(system, map_point, span, interior_offset);
  }
  return make_rejection_sampler(system, span, true);
}

HypothesisReport check_jump_structure(const SystemSpec& system, const SurfaceSampler& sampler,
                                      const CheckOptions& options) {
  HypothesisReport report;
  const auto points = collect_samples(sampler, options.samples, options.seed);

  ConditionResult separation, image_in_c;
  separation.sample_count = image_in_c.sample_count = static_cast<long>(points.size());
  if (points.empty()) {
    separation.verdict = image_in_c.verdict = Verdict::unknown;
    separation.note = image_in_c.note = "sampler produced no jump-set points";
  } else {
    double sep_margin = kInf, img_margin = kInf;
    StateVector sep_worst, img_worst;
    for (const auto& z : points) {
      const StateVector g = system.apply_jump(z);
      double d = kInf;
      if (auto nearest = nearest_on_jump_set(system, g)) d = nearest->objective;
      if (d < sep_margin) {
        sep_margin = d;
        sep_worst = z;
      }
      const double c = system.flow_set_fn(g);
      if (c < img_margin) {
        img_margin = c;
        img_worst = z;
      }
    }
    separation.margin = sep_margin;
    separation.verdict = sep_margin > options.margin_tol ? Verdict::pass : Verdict::fail;
    if (separation.verdict == Verdict::fail) separation.counterexample = sep_worst;
    image_in_c.margin = img_margin;
    image_in_c.verdict = img_margin >= -options.margin_tol ? Verdict::pass : Verdict::fail;
    if (image_in_c.verdict == Verdict::fail) image_in_c.counterexample = img_worst;
  }

  ConditionResult properness;
  if (system.jump_set_bounded) {
    properness.verdict = Verdict::pass;
    properness.note = "jump set declared bounded";
  } else if (system.jump_set_param && system.jump_set_param->dim == 1) {
    // Geometric radius ladder: min ||G(z)|| over shells ||z|| in
    // [R_k, 2 R_k] has to grow without bound for a proper map.
    const auto& p = *system.jump_set_param;
    const double hi = param_upper(p);
    const double lo = param_lower(p);
    const double edge = std::isfinite(hi) ? hi : lo;
    const double inward = std::isfinite(hi) ? -1.0 : 1.0;
    std::mt19937_64 rng(options.seed ^ 0xABCDEF);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r0 = std::max(1.0, norm(p.point({edge})));
    std::vector<double> shell_min;
    for (int k = 0; k <= 20; ++k) {
      const double R = r0 * std::pow(2.0, k);
      const double s_in = offset_param(p, nullptr, edge, inward, R);
      const double s_out = offset_param(p, nullptr, edge, inward, 2.0 * R);
      double mn = kInf;
      for (int i = 0; i < 8; ++i) {
        const double s = s_in + (s_out - s_in) * unit(rng);
        mn = std::min(mn, norm(system.apply_jump(p.point({s}))));
      }
      if (std::isfinite(mn)) shell_min.push_back(mn);
    }
    properness.sample_count = static_cast<long>(8 * shell_min.size());
    if (shell_min.size() < 4) {
      properness.verdict = Verdict::unknown;
      properness.note = "radius ladder produced too few shells";
    } else {
      const double first = shell_min.front();
      const double last = shell_min.back();
      properness.margin = last - first;
      const bool grows = last >= 10.0 * std::max(first, options.margin_tol) && last >= 100.0;
      properness.verdict = grows ? Verdict::pass : Verdict::fail;
      if (!grows) {
        properness.note = "image norm does not grow along escaping jump-set samples";
        const double s_far = offset_param(p, nullptr, edge, inward, r0 * std::pow(2.0, 20));
        properness.counterexample = p.point({s_far});
      }
    }
  } else {
    properness.verdict = Verdict::unknown;
    properness.note = "unbounded jump set without a parameterization to escape along";
  }

  report.conditions["i_separation"] = std::move(separation);
  report.conditions["i_image_in_C"] = std::move(image_in_c);
  report.conditions["i_properness"] = std::move(properness);
  return report;
}

HypothesisReport check_transversality(const SystemSpec& system, ProbeDirection direction,
                                      const SurfaceSampler& sampler,
                                      const CheckOptions& options) {
  HypothesisReport report;
  ConditionResult cond;
  const auto points = collect_samples(sampler, options.samples, options.seed);

  long degenerate = 0;
  double worst = direction == ProbeDirection::forward ? -kInf : kInf;
  StateVector worst_point;
  long used = 0;
  for (const auto& z : points) {
    if (system.flow_set_fn(z) < -std::max(1e-7, options.margin_tol)) continue;
    const StateVector g = system.gradient_of_flow_set(z);
    const double gn = norm(g);
    if (gn < 1e-12) {
      ++degenerate;
      continue;
    }
    for (double that : system.time_samples) {
      const StateVector f = system.eval_flow(that, z);
      double s = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) s += g[i] * f[i];
      s /= gn;
      if (direction == ProbeDirection::forward ? s > worst : s < worst) {
        worst = s;
        worst_point = z;
      }
    }
    ++used;
  }
  cond.sample_count = used;
  const char* key = direction == ProbeDirection::forward ? "ii_forward_transversality"
                                                         : "iii_backward_transversality";
  if (used == 0) {
    cond.verdict = Verdict::unknown;
    cond.note = "no usable surface samples";
  } else if (degenerate * 10 > (used + degenerate)) {
    cond.verdict = Verdict::unknown;
    cond.note = "more than 10% of boundary samples have a degenerate gradient";
  } else {
    cond.margin = direction == ProbeDirection::forward ? -worst : worst;
    cond.verdict = cond.margin > options.margin_tol ? Verdict::pass : Verdict::fail;
    if (cond.verdict == Verdict::fail) cond.counterexample = worst_point;
  }
  report.conditions[key] = std::move(cond);
  return report;
}

HypothesisReport check_boundedness(const SystemSpec& system, const HybridArc* reference,
                                   double R) {
  HypothesisReport report;
  ConditionResult cond;
  if (system.jump_set_bounded) {
    cond.margin = R - system.jump_set_radius;
    cond.verdict = system.jump_set_radius <= R ? Verdict::pass : Verdict::fail;
    cond.note = "jump set declared bounded with radius " + std::to_string(system.jump_set_radius);
  } else if (reference != nullptr && !reference->segments.empty()) {
    double mx = 0.0;
    StateVector worst;
    long count = 0;
    for (const auto& seg : reference->segments) {
      for (const auto& s : seg.samples) {
        ++count;
        const double nv = norm(s.x);
        if (nv > mx) {
          mx = nv;
          worst = s.x;
        }
      }
    }
    cond.sample_count = count;
    cond.margin = R - mx;
    cond.verdict = mx <= R ? Verdict::pass : Verdict::fail;
    cond.note = "reference arc max norm " + std::to_string(mx);
    if (cond.verdict == Verdict::fail) cond.counterexample = worst;
  } else {
    cond.verdict = Verdict::unknown;
    cond.note = "jump set unbounded and no reference arc supplied";
  }
  report.conditions["iv_boundedness"] = std::move(cond);
  return report;
}

HypothesisReport run_hypothesis_checks(const SystemSpec& system, const HybridArc* reference,
                                       double R, const CheckOptions& options) {
  HypothesisReport report = check_jump_structure(system, jump_set_sampler(system), options);
  report.merge(
      check_transversality(system, ProbeDirection::forward, jump_set_sampler(system), options));
  report.merge(
      check_transversality(system, ProbeDirection::backward, jump_image_sampler(system), options));
  report.merge(check_boundedness(system, reference, R));
  return report;
}

double LemmaProbeTable::ratio_bound() const {
  double k = 0.0;
  for (const auto& row : rows) {
    if (row.reached && row.eps_in > 0.0) k = std::max(k, row.max_mismatch_time / row.eps_in);
  }
  return k;
}

LemmaProbeTable lemma_probe(const SystemSpec& system, ProbeDirection direction,
                            const std::vector<double>& eps_list, const IntegratorConfig& config,
                            const LemmaProbeOptions& options) {
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("lemma_probe: eps_list must be strictly decreasing");
    }
  }
  {
    const SurfaceSampler sampler = direction == ProbeDirection::forward
                                       ? jump_set_sampler(system, options.span)
                                       : jump_image_sampler(system, options.span);
    HypothesisReport trans = check_transversality(system, direction, sampler,
                                                  options.transversality);
    for (const auto& [key, cond] : trans.conditions) {
      if (cond.verdict != Verdict::pass) {
        throw std::invalid_argument(
            std::string("lemma_probe: transversality precondition not verified (") + key + " = " +
            to_string(cond.verdict) + ", margin " + std::to_string(cond.margin) +
            "); the mismatch bound of the probe is only claimed under it");
      }
    }
  }

  LemmaProbeTable table;
  table.direction = direction;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (double eps : eps_list) {
    const double interior = options.interior_factor * eps;
    const SurfaceSampler sampler = direction == ProbeDirection::forward
                                       ? jump_set_sampler(system, options.span, interior)
                                       : jump_image_sampler(system, options.span, interior);
    LemmaProbeRow row;
    row.eps_in = eps;
    row.max_mismatch_time = 0.0;
    std::size_t fixed_used = 0;
    for (int i = 0; i < options.samples_per_eps; ++i) {
      StateVector base;
      if (fixed_used < sampler.fixed.size()) {
        base = sampler.fixed[fixed_used++];
      } else {
        base = sampler.draw(rng);
        if (base.empty()) continue;
      }
      // Perturb within the eps ball, staying inside C.
      StateVector x;
      for (int attempt = 0; attempt < 200; ++attempt) {
        StateVector dir(system.dimension);
        double s = 0.0;
        for (auto& v : dir) {
          v = gauss(rng);
          s += v * v;
        }
        if (s == 0.0) continue;
        const double r = eps * std::pow(unit(rng), 1.0 / system.dimension) / std::sqrt(s);
        StateVector cand = base;
        for (int k = 0; k < system.dimension; ++k) cand[k] += r * dir[k];
        if (system.flow_set_fn(cand) >= 0.0) {
          x = std::move(cand);
          break;
        }
      }
      if (x.empty()) continue;
      ++row.samples;

      double time_to_surface = kInf;
      if (direction == ProbeDirection::forward) {
        if (system.in_jump_set(x)) {
          time_to_surface = 0.0;
        } else {
          FlowSegmentResult res = flow_until_event(system, x, 0.0, config);
          if (res.stop == FlowStop::event) time_to_surface = res.t_event;
        }
      } else {
        if (system.in_jump_image(x)) {
          time_to_surface = 0.0;
        } else {
          FlowSegmentResult res = simulate_reversed(system, x, config);
          if (res.stop == FlowStop::event) time_to_surface = res.t_event;
        }
      }
      if (!std::isfinite(time_to_surface)) {
        row.reached = false;
        row.max_mismatch_time = kInf;
      } else if (row.reached) {
        row.max_mismatch_time = std::max(row.max_mismatch_time, time_to_surface);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace hybrid
