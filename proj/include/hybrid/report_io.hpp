#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hybrid/hypotheses.hpp"
#include "hybrid/metrics.hpp"
#include "hybrid/systems.hpp"

namespace hybrid {

nlohmann::json distance_report_to_json(const DistanceReport& report);
nlohmann::json closeness_report_to_json(const ClosenessReport& report);
nlohmann::json stability_report_to_json(const StabilityReport& report);
nlohmann::json hypothesis_report_to_json(const HypothesisReport& report);
nlohmann::json lemma_table_to_json(const LemmaProbeTable& table);

/// One row per radius x T, columns radius,T,graphical_eps,rho_eps.
std::string stability_report_to_csv(const StabilityReport& report);

/// Human-readable verdict table with margins.
std::string hypothesis_report_to_text(const HypothesisReport& report);
std::string lemma_table_to_text(const LemmaProbeTable& table);

void write_text(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& doc);

/// (t, value) trace as CSV with 17 significant digits.
void write_trace_csv(const std::string& path,
                     const std::vector<std::pair<double, double>>& trace,
                     const std::string& value_name);

/// Run manifest: resolved parameters, seed and version, enabling bit-exact
/// re-runs.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& resolved_config,
                             const std::vector<std::string>& outputs);

}  // namespace hybrid
