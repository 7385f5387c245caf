#include "hybrid/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hybrid/set_geometry.hpp"

namespace hybrid {

const char* to_string(Branch b) {
  switch (b) {
    case Branch::A00: return "A00";
    case Branch::A01: return "A01";
    case Branch::A10: return "A10";
  }
  return "?";
}

namespace {

bool in_union(const SystemSpec& system, const StateVector& z) {
  return system.flow_set_fn(z) >= 0.0 || system.in_jump_set(z) || system.in_jump_image(z);
}

}  // namespace

DistanceReport rho_a(const SystemSpec& system, const StateVector& x1, const StateVector& x2) {
  require_dimension(x1, system.dimension, "rho_a x1");
  require_dimension(x2, system.dimension, "rho_a x2");
  require_finite(x1, "rho_a x1");
  require_finite(x2, "rho_a x2");

  DistanceReport report;
  const StateVector m = midpoint(x1, x2);
  const double w2 = distance_squared(x1, x2);

  // A00: the objective ||x1 - z||^2 + ||x2 - z||^2 equals
  // 2 ||z - m||^2 + ||x1 - x2||^2 / 2, so the constrained minimum is the
  // projection of the midpoint onto C u D u G(D). The pair {x1, x2} is also
  // tried directly, which keeps value <= ||x1 - x2|| exact whenever the first
  // argument lies in the set.
  double a00 = std::numeric_limits<double>::infinity();
  StateVector a00_witness;
  bool a00_unknown = false;
  auto consider_dform = [&](const StateVector& z) {
    const double v = std::sqrt(2.0 * distance_squared(z, m) + w2 / 2.0);
    if (v < a00) {
      a00 = v;
      a00_witness = z;
    }
  };
  auto consider_direct = [&](const StateVector& z) {
    const double v = std::sqrt(distance_squared(x1, z) + distance_squared(x2, z));
    if (v < a00) {
      a00 = v;
      a00_witness = z;
    }
  };

  if (in_union(system, m)) consider_dform(m);
  if (auto proj = project_onto_flow_boundary(system, m)) consider_dform(*proj);
  if (auto nd = nearest_on_jump_set(system, m)) {
    consider_dform(nd->point);
    if (!nd->converged) a00_unknown = true;
  }
  if (auto ng = nearest_on_jump_image(system, m)) consider_dform(ng->point);
  if (in_union(system, x1)) consider_direct(x1);
  if (in_union(system, x2)) consider_direct(x2);
  if (!std::isfinite(a00)) {
    consider_dform(m);
    a00_unknown = true;
  }

  // A01: pairs (G(z), z); A10: pairs (z, G(z)). The kernel argument order is
  // (D-side, G-side), which makes rho_a(x, y).A01 and rho_a(y, x).A10 the
  // same computation bit for bit.
  double a01 = std::numeric_limits<double>::infinity();
  double a10 = std::numeric_limits<double>::infinity();
  StateVector a01_witness, a10_witness;
  bool pair_unknown = false;
  if (auto r = minimize_pair_over_jump_set(system, x2, x1)) {
    a01 = r->objective;
    a01_witness = r->point;
    if (!r->converged) pair_unknown = true;
  } else {
    pair_unknown = true;
  }
  if (auto r = minimize_pair_over_jump_set(system, x1, x2)) {
    a10 = r->objective;
    a10_witness = r->point;
    if (!r->converged) pair_unknown = true;
  } else {
    pair_unknown = true;
  }

  report.branch_values = {a00, a01, a10};
  report.branch_witnesses = {a00_witness, a01_witness, a10_witness};
  report.unknown = a00_unknown || pair_unknown;

  report.value = a00;
  report.branch = Branch::A00;
  report.witness = a00_witness;
  if (a01 < report.value) {
    report.value = a01;
    report.branch = Branch::A01;
    report.witness = a01_witness;
  }
  if (a10 < report.value) {
    report.value = a10;
    report.branch = Branch::A10;
    report.witness = a10_witness;
  }
  return report;
}

double rho_a_value(const SystemSpec& system, const StateVector& x1, const StateVector& x2) {
  return rho_a(system, x1, x2).value;
}

}  // namespace hybrid
