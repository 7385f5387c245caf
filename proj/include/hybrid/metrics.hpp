#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "hybrid/arc.hpp"
#include "hybrid/integrator.hpp"
#include "hybrid/system.hpp"

namespace hybrid {

// ---------------------------------------------------------------------------
// Distance rho_A between a pair of states: the Euclidean distance in the
// product space from the set of "equivalent" pairs (equal states, or one
// state the jump image of the other). Decomposed into three branches:
//   A00: pairs (z, z), z in C u D u G(D)
//   A01: pairs (G(z), z), z in D
//   A10: pairs (z, G(z)), z in D
// ---------------------------------------------------------------------------

enum class Branch { A00 = 0, A01 = 1, A10 = 2 };

const char* to_string(Branch b);

struct DistanceReport {
  double value = 0.0;
  Branch branch = Branch::A00;
  StateVector witness;  // minimizing z (common point for A00, D point otherwise)
  std::array<double, 3> branch_values{};  // indexed by Branch
  std::array<StateVector, 3> branch_witnesses{};
  bool unknown = false;  // set when a branch search failed to converge

  double branch_value(Branch b) const { return branch_values[static_cast<int>(b)]; }
};

DistanceReport rho_a(const SystemSpec& system, const StateVector& x1, const StateVector& x2);
double rho_a_value(const SystemSpec& system, const StateVector& x1, const StateVector& x2);

// ---------------------------------------------------------------------------
// Independent brute-force oracle: minimizes the three branch objectives over
// a regular grid with set-membership filtering.
// ---------------------------------------------------------------------------

struct GridSpec {
  StateVector lo;
  StateVector hi;
  double resolution = 1e-3;
};

/// Reusable oracle: the grid members of D and G(D) are enumerated once.
class RhoOracle {
 public:
  RhoOracle(const SystemSpec& system, GridSpec grid);
  double evaluate(const StateVector& x1, const StateVector& x2) const;

 private:
  const SystemSpec& system_;
  GridSpec grid_;
  std::vector<long> dims_;
  std::vector<StateVector> d_members_;
  std::vector<StateVector> d_images_;   // G of each D member
  std::vector<StateVector> gd_members_;
  double coarse_stride_ = 0.05;
};

double rho_a_oracle(const SystemSpec& system, const StateVector& x1, const StateVector& x2,
                    const GridSpec& grid);

// ---------------------------------------------------------------------------
// Closeness of arc pairs: measured epsilon for the graphical notion (time
// shift allowed, Chebyshev combination of |t - t'| and state distance) and
// for the rho_A notion (equal continuous times).
// ---------------------------------------------------------------------------

struct ClosenessWitness {
  double t = 0.0;
  int j = 0;
  double t_other = 0.0;
  int j_other = 0;
  double value = 0.0;
};

struct ClosenessReport {
  double epsilon = 0.0;
  double direction_forward = 0.0;
  double direction_backward = 0.0;
  ClosenessWitness worst_witness;
  double tail_start = 0.0;
  bool truncated = false;  // domains' t-ranges differ; restricted to common range
};

struct EnvelopeEntry {
  double t = 0.0;
  int j = 0;
  double value = 0.0;
  double t_other = 0.0;
  int j_other = 0;
};

/// Per-sample profile of one direction of a closeness comparison; tail
/// suprema for any T are suffix maxima of this.
using Envelope = std::vector<EnvelopeEntry>;

struct ClosenessProfile {
  Envelope forward;
  Envelope backward;
  bool truncated = false;
  ClosenessReport report(double tail_start = 0.0) const;  // throws when T exceeds the range
};

ClosenessProfile graphical_closeness_profile(const HybridArc& a, const HybridArc& b,
                                             double search_window = 0.0, double grid = 1e-3);
ClosenessProfile rho_closeness_profile(const HybridArc& a, const HybridArc& b,
                                       const SystemSpec& system);

ClosenessReport graphical_eps(const HybridArc& a, const HybridArc& b, double tail_start = 0.0,
                              double search_window = 0.0, double grid = 1e-3);
ClosenessReport rho_eps(const HybridArc& a, const HybridArc& b, const SystemSpec& system,
                        double tail_start = 0.0);

/// sup over the dense common time grid of the pointwise Euclidean mismatch
/// min_{j, j'} ||a(t,j) - b(t,j')||; the quantity that peaks when jump times
/// disagree. The sup can be restricted to [t_lo, t_hi].
ClosenessWitness equal_time_euclidean_sup(const HybridArc& a, const HybridArc& b,
                                          double grid = 1e-3, double t_lo = 0.0,
                                          double t_hi = std::numeric_limits<double>::infinity());

/// Pointwise forward rho_A trace: for each grid t, max over j of
/// min over j' of rho_A(a(t,j), b(t,j')).
std::vector<std::pair<double, double>> rho_trace(const HybridArc& a, const HybridArc& b,
                                                 const SystemSpec& system, double grid = 1e-3);

// ---------------------------------------------------------------------------
// Stability sweep over initial-condition radii.
// ---------------------------------------------------------------------------

struct SweepRadiusRow {
  double radius = 0.0;
  double graphical = 0.0;
  double rho = 0.0;
  std::vector<std::array<double, 3>> tail_profile;  // {T, graphical tail, rho tail}
  int samples_used = 0;
  int failures = 0;
};

struct StabilityReport {
  std::vector<SweepRadiusRow> rows;
  std::vector<double> t_grid;
  bool monotone_in_delta = false;
  bool decaying_tail = false;
  std::uint64_t seed = 0;
};

struct SweepOptions {
  std::uint64_t seed = 1;
  double grid = 1e-3;
  double search_window = 0.0;  // 0 = auto
  int workers = 0;             // 0 = hardware concurrency
};

StabilityReport stability_sweep(const SystemSpec& system, const HybridArc& reference,
                                const std::vector<double>& radii, int samples_per_radius,
                                const std::vector<double>& t_grid, const IntegratorConfig& config,
                                const SweepOptions& options = {});

}  // namespace hybrid
