#pragma once

#include <utility>
#include <vector>

#include "hybrid/state.hpp"
#include "hybrid/time_domain.hpp"

namespace hybrid {

/// One stored integration node. dx holds the flow-field value at the node
/// when available; dense interpolation between nodes is cubic Hermite with
/// these derivatives and falls back to linear without them.
struct FlowSample {
  double t = 0.0;
  StateVector x;
  StateVector dx;
};

struct FlowSegment {
  int j = 0;
  std::vector<FlowSample> samples;
};

struct JumpRecord {
  double t = 0.0;
  int j = 0;  // index before the jump
  StateVector x_minus;
  StateVector x_plus;
};

enum class TerminationReason { horizon, left_flow_set, jump_cap, solver_failure };

const char* to_string(TerminationReason r);
TerminationReason termination_reason_from_string(const std::string& s);

/// A flow-and-jump solution sampled on its hybrid time domain.
struct HybridArc {
  HybridTimeDomain domain;
  std::vector<FlowSegment> segments;
  std::vector<JumpRecord> jumps;
  bool t_complete_up_to_horizon = false;
  TerminationReason terminated_reason = TerminationReason::horizon;

  int dimension() const;
  double start_time() const { return domain.start_time(); }
  double end_time() const { return domain.end_time(); }
  double max_norm() const;

  /// phi(t, j). Exact (bit-equal) at stored nodes, interpolated between
  /// them. Throws std::out_of_range naming the nearest valid (t, j) when
  /// (t, j) is outside the domain.
  StateVector state_at(double t, int j, double tol = 1e-9) const;

  /// All (j, state) pairs with (t, j) in the domain; exactly two at a jump
  /// instant.
  std::vector<std::pair<int, StateVector>> slice_at_time(double t, double tol = 1e-9) const;
};

StateVector arc_state_at(const HybridArc& arc, double t, int j);
std::vector<std::pair<int, StateVector>> arc_slice_at_time(const HybridArc& arc, double t);

}  // namespace hybrid
