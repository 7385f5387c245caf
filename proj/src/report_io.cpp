#include "hybrid/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hybrid {

namespace {

nlohmann::json vec_to_json(const StateVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

nlohmann::json distance_report_to_json(const DistanceReport& report) {
  nlohmann::json doc;
  doc["value"] = report.value;
  doc["branch"] = to_string(report.branch);
  doc["witness"] = vec_to_json(report.witness);
  doc["branch_values"] = {{"A00", report.branch_values[0]},
                          {"A01", report.branch_values[1]},
                          {"A10", report.branch_values[2]}};
  doc["unknown"] = report.unknown;
  return doc;
}

nlohmann::json closeness_report_to_json(const ClosenessReport& report) {
  nlohmann::json doc;
  doc["epsilon"] = report.epsilon;
  doc["direction_forward"] = report.direction_forward;
  doc["direction_backward"] = report.direction_backward;
  doc["worst_witness"] = {{"t", report.worst_witness.t},
                          {"j", report.worst_witness.j},
                          {"t_prime", report.worst_witness.t_other},
                          {"j_prime", report.worst_witness.j_other},
                          {"value", report.worst_witness.value}};
  doc["tail_start"] = report.tail_start;
  doc["truncated"] = report.truncated;
  return doc;
}

nlohmann::json stability_report_to_json(const StabilityReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json tail = nlohmann::json::array();
    for (const auto& p : r.tail_profile) {
      tail.push_back({{"T", p[0]}, {"graphical_eps", p[1]}, {"rho_eps", p[2]}});
    }
    rows.push_back({{"radius", r.radius},
                    {"graphical_eps", r.graphical},
                    {"rho_eps", r.rho},
                    {"tail_profile", std::move(tail)},
                    {"samples_used", r.samples_used},
                    {"failures", r.failures}});
  }
  return nlohmann::json{{"rows", std::move(rows)},
                        {"t_grid", report.t_grid},
                        {"verdicts",
                         {{"monotone_in_delta", report.monotone_in_delta},
                          {"decaying_tail", report.decaying_tail}}},
                        {"seed", report.seed}};
}

nlohmann::json hypothesis_report_to_json(const HypothesisReport& report) {
  nlohmann::json conditions;
  for (const auto& [name, cond] : report.conditions) {
    nlohmann::json c;
    c["verdict"] = to_string(cond.verdict);
    c["margin"] = std::isfinite(cond.margin) ? nlohmann::json(cond.margin) : nlohmann::json();
    c["counterexample"] =
        cond.counterexample ? vec_to_json(*cond.counterexample) : nlohmann::json();
    c["sample_count"] = cond.sample_count;
    if (!cond.note.empty()) c["note"] = cond.note;
    conditions[name] = std::move(c);
  }
  return nlohmann::json{{"conditions", std::move(conditions)},
                        {"all_pass", report.all_pass()}};
}

nlohmann::json lemma_table_to_json(const LemmaProbeTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"eps_in", r.eps_in},
                    {"max_mismatch_time",
                     r.reached ? nlohmann::json(r.max_mismatch_time) : nlohmann::json()},
                    {"reached", r.reached},
                    {"samples", r.samples}});
  }
  return nlohmann::json{{"direction", to_string(table.direction)},
                        {"rows", std::move(rows)},
                        {"ratio_bound", table.ratio_bound()}};
}

std::string stability_report_to_csv(const StabilityReport& report) {
  std::ostringstream os;
  os << "radius,T,graphical_eps,rho_eps\n";
  for (const auto& r : report.rows) {
    const bool grid_has_zero = !r.tail_profile.empty() && r.tail_profile.front()[0] == 0.0;
    if (!grid_has_zero) {
      os << num17(r.radius) << ",0," << num17(r.graphical) << "," << num17(r.rho) << "\n";
    }
    for (const auto& p : r.tail_profile) {
      os << num17(r.radius) << "," << num17(p[0]) << "," << num17(p[1]) << "," << num17(p[2])
         << "\n";
    }
  }
  return os.str();
}

std::string hypothesis_report_to_text(const HypothesisReport& report) {
  std::ostringstream os;
  os << "condition                      verdict   margin        samples\n";
  for (const auto& [name, cond] : report.conditions) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-30s %-9s %-13.6g %ld\n", name.c_str(),
                  to_string(cond.verdict), cond.margin, cond.sample_count);
    os << line;
    if (!cond.note.empty()) os << "    note: " << cond.note << "\n";
    if (cond.counterexample) {
      os << "    counterexample: [";
      for (std::size_t i = 0; i < cond.counterexample->size(); ++i) {
        os << (i ? ", " : "") << (*cond.counterexample)[i];
      }
      os << "]\n";
    }
  }
  os << (report.all_pass() ? "all conditions pass\n" : "NOT all conditions pass\n");
  return os.str();
}

std::string lemma_table_to_text(const LemmaProbeTable& table) {
  std::ostringstream os;
  os << "direction: " << to_string(table.direction) << "\n";
  os << "eps_in        max_mismatch_time   samples\n";
  for (const auto& r : table.rows) {
    char line[120];
    if (r.reached) {
      std::snprintf(line, sizeof(line), "%-13.6g %-19.6g %d\n", r.eps_in, r.max_mismatch_time,
                    r.samples);
    } else {
      std::snprintf(line, sizeof(line), "%-13.6g %-19s %d\n", r.eps_in, "unreached(+inf)",
                    r.samples);
    }
    os << line;
  }
  os << "ratio bound K (max over rows of time/eps): " << table.ratio_bound() << "\n";
  return os.str();
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

void write_trace_csv(const std::string& path,
                     const std::vector<std::pair<double, double>>& trace,
                     const std::string& value_name) {
  std::ostringstream os;
  os << "t," << value_name << "\n";
  for (const auto& [t, v] : trace) os << num17(t) << "," << num17(v) << "\n";
  write_text(path, os.str());
}

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& resolved_config,
                             const std::vector<std::string>& outputs) {
  return nlohmann::json{{"command", command},
                        {"config", resolved_config},
                        {"outputs", outputs},
                        {"version", "0.1.0"}};
}

}  // namespace hybrid
