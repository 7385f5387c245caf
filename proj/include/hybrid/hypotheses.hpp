#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hybrid/arc.hpp"
#include "hybrid/integrator.hpp"
#include "hybrid/system.hpp"

namespace hybrid {

enum class Verdict { pass, fail, unknown };
const char* to_string(Verdict v);

/// Sampling-based result for one structure condition: pass/fail with the
/// worst-case signed margin over the samples (positive = satisfied with
/// room), plus a counterexample when the condition fails.
struct ConditionResult {
  Verdict verdict = Verdict::unknown;
  double margin = 0.0;
  std::optional<StateVector> counterexample;
  long sample_count = 0;
  std::string note;
};

struct HypothesisReport {
  std::map<std::string, ConditionResult> conditions;
  bool all_pass() const;
  void merge(const HypothesisReport& other);
};

/// Draws points on a surface (D or G(D)). fixed points are always included;
/// draw may return an empty vector to signal a rejected sample.
struct SurfaceSampler {
  std::vector<StateVector> fixed;
  std::function<StateVector(std::mt19937_64&)> draw;
};

/// Default samplers. span bounds how far along the surface parameterization
/// the samples reach; interior_offset keeps them away from the relative
/// boundary of the surface (0 = include it).
SurfaceSampler jump_set_sampler(const SystemSpec& system, double span = 3.0,
                                double interior_offset = 0.0);
SurfaceSampler jump_image_sampler(const SystemSpec& system, double span = 3.0,
                                  double interior_offset = 0.0);

struct CheckOptions {
  long samples = 10000;
  double margin_tol = 1e-7;
  std::uint64_t seed = 1;
};

/// Condition (i): G(D) disjoint from D, G(D) inside C, G proper.
/// Keys: i_separation, i_image_in_C, i_properness.
HypothesisReport check_jump_structure(const SystemSpec& system, const SurfaceSampler& sampler,
                                      const CheckOptions& options = {});

enum class ProbeDirection { forward, backward };
const char* to_string(ProbeDirection d);

/// Conditions (ii)/(iii): the flow crosses the boundary of C transversally on
/// C n D (forward) resp. reversed on C n G(D) (backward). Margin is the
/// normal speed of the flow through the boundary, positive when compliant.
/// Keys: ii_forward_transversality / iii_backward_transversality.
HypothesisReport check_transversality(const SystemSpec& system, ProbeDirection direction,
                                      const SurfaceSampler& sampler,
                                      const CheckOptions& options = {});

/// Condition (iv): D bounded within R, or the reference arc bounded by R.
/// Key: iv_boundedness.
HypothesisReport check_boundedness(const SystemSpec& system, const HybridArc* reference,
                                   double R = 10.0);

/// All six condition checks with the default samplers.
HypothesisReport run_hypothesis_checks(const SystemSpec& system, const HybridArc* reference,
                                       double R = 10.0, const CheckOptions& options = {});

struct LemmaProbeRow {
  double eps_in = 0.0;
  double max_mismatch_time = 0.0;  // +inf when some sample never reached the surface
  bool reached = true;
  int samples = 0;
};

struct LemmaProbeTable {
  ProbeDirection direction = ProbeDirection::forward;
  std::vector<LemmaProbeRow> rows;  // eps_in strictly decreasing
  /// Table-wide bound K with max_mismatch_time <= K * eps_in on finite rows.
  double ratio_bound() const;
};

struct LemmaProbeOptions {
  int samples_per_eps = 100;
  std::uint64_t seed = 1;
  double span = 3.0;
  /// Base surface points are kept interior_factor * eps_in inside the
  /// relative boundary of the surface: samples perturbed across the edge of
  /// D generate maximal solutions that die at the boundary instead of
  /// jumping, which the lemmas exclude by requiring t-completeness.
  double interior_factor = 5.0;
  CheckOptions transversality;
};

/// Empirical jump-time-mismatch bound: samples within eps_in of C n D
/// (forward) or C n G(D) (backward), flows to the surface, and records the
/// worst time needed. Refuses when the matching transversality check fails.
LemmaProbeTable lemma_probe(const SystemSpec& system, ProbeDirection direction,
                            const std::vector<double>& eps_list, const IntegratorConfig& config,
                            const LemmaProbeOptions& options = {});

}  // namespace hybrid
