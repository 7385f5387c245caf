#include "hybrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <random>
#include <thread>

namespace hybrid {

namespace {

StateVector unit_ball_point(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StateVector v(n);
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& c : v) {
      c = gauss(rng);
      s += c * c;
    }
  } while (s == 0.0);
  const double r = std::pow(unit(rng), 1.0 / n) / std::sqrt(s);
  for (auto& c : v) c *= r;
  return v;
}

struct SampleOutcome {
  bool ok = false;
  double graphical = 0.0;
  double rho = 0.0;
  std::vector<double> graphical_tail;
  std::vector<double> rho_tail;
};

}  // namespace

StabilityReport stability_sweep(const SystemSpec& system, const HybridArc& reference,
                                const std::vector<double>& radii, int samples_per_radius,
                                const std::vector<double>& t_grid, const IntegratorConfig& config,
                                const SweepOptions& options) {
  for (double r : radii) {
    if (r < 0.0) throw std::invalid_argument("stability_sweep: radii must be >= 0");
  }
  if (samples_per_radius <= 0) {
    throw std::invalid_argument("stability_sweep: samples_per_radius must be > 0");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("stability_sweep: t_grid must be strictly increasing");
    }
  }
  StabilityReport report;
  report.t_grid = t_grid;
  report.seed = options.seed;

  const StateVector origin = reference.state_at(reference.start_time(), 0);
  const int n = system.dimension;

  // The unit-ball draw for sample i is shared across radii, so shrinking the
  // radius shrinks every sampled offset proportionally.
  std::vector<StateVector> ball_points(samples_per_radius);
  for (int i = 0; i < samples_per_radius; ++i) {
    std::mt19937_64 rng(options.seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(i) + 1)));
    ball_points[i] = unit_ball_point(rng, n);
  }

  IntegratorConfig sample_config = config;
  sample_config.horizon = std::min(config.horizon, reference.end_time());

  const int workers = options.workers > 0
                          ? options.workers
                          : std::max(1u, std::thread::hardware_concurrency());

  for (double radius : radii) {
    SweepRadiusRow row;
    row.radius = radius;
    std::vector<SampleOutcome> outcomes(samples_per_radius);

    auto run_sample = [&](int i) {
      SampleOutcome out;
      try {
        StateVector x0 = origin;
        if (radius > 0.0) {
          for (int k = 0; k < n; ++k) x0[k] += radius * ball_points[i][k];
        }
        HybridArc arc = simulate(system, x0, sample_config);
        if (arc.terminated_reason == TerminationReason::solver_failure) return out;
        auto gp = graphical_closeness_profile(reference, arc, options.search_window, options.grid);
        auto rp = rho_closeness_profile(reference, arc, system);
        out.graphical = gp.report(0.0).epsilon;
        out.rho = rp.report(0.0).epsilon;
        for (double T : t_grid) {
          out.graphical_tail.push_back(gp.report(T).epsilon);
          out.rho_tail.push_back(rp.report(T).epsilon);
        }
        out.ok = true;
      } catch (const std::exception&) {
        out.ok = false;
      }
      return out;
    };

    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int i = next.fetch_add(1); i < samples_per_radius; i = next.fetch_add(1)) {
        outcomes[i] = run_sample(i);
      }
    };
    std::vector<std::future<void>> futures;
    for (int w = 0; w < std::min(workers, samples_per_radius); ++w) {
      futures.push_back(std::async(std::launch::async, worker));
    }
    for (auto& f : futures) f.get();

    row.tail_profile.resize(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      row.tail_profile[k] = {t_grid[k], 0.0, 0.0};
    }
    for (const auto& out : outcomes) {
      if (!out.ok) {
        ++row.failures;
        continue;
      }
      ++row.samples_used;
      row.graphical = std::max(row.graphical, out.graphical);
      row.rho = std::max(row.rho, out.rho);
      for (std::size_t k = 0; k < t_grid.size(); ++k) {
        row.tail_profile[k][1] = std::max(row.tail_profile[k][1], out.graphical_tail[k]);
        row.tail_profile[k][2] = std::max(row.tail_profile[k][2], out.rho_tail[k]);
      }
    }
    report.rows.push_back(std::move(row));
  }

  // Verdicts. Monotone: epsilon non-increasing as the radius decreases.
  std::vector<const SweepRadiusRow*> by_radius;
  for (const auto& r : report.rows) by_radius.push_back(&r);
  std::sort(by_radius.begin(), by_radius.end(),
            [](const SweepRadiusRow* a, const SweepRadiusRow* b) { return a->radius > b->radius; });
  report.monotone_in_delta = true;
  for (std::size_t i = 1; i < by_radius.size(); ++i) {
    if (by_radius[i]->graphical > by_radius[i - 1]->graphical + 1e-12) {
      report.monotone_in_delta = false;
    }
  }
  report.decaying_tail = true;
  for (const auto& r : report.rows) {
    if (r.tail_profile.size() < 2) continue;
    const double head = r.tail_profile.front()[1];
    const double tail = r.tail_profile.back()[1];
    if (r.samples_used == 0 || tail > 0.5 * std::max(head, 1e-9)) {
      report.decaying_tail = false;
    }
  }
  return report;
}

}  // namespace hybrid
