#include "hybrid/arc_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace hybrid {

namespace {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json vec_to_json(const StateVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(x);
  return a;
}

StateVector vec_from_json(const nlohmann::json& a) {
  StateVector v;
  v.reserve(a.size());
  for (const auto& x : a) v.push_back(x.get<double>());
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

}  // namespace

void arc_to_csv(const HybridArc& arc, std::ostream& os) {
  const int n = arc.dimension();
  os << "t,j";
  for (int i = 0; i < n; ++i) os << ",x" << i;
  os << "\n";
  for (const auto& seg : arc.segments) {
    for (const auto& s : seg.samples) {
      os << csv_number(s.t) << "," << seg.j;
      for (double v : s.x) os << "," << csv_number(v);
      os << "\n";
    }
  }
}

void write_arc_csv(const HybridArc& arc, const std::string& path) {
  auto os = open_out(path);
  arc_to_csv(arc, os);
}

nlohmann::json arc_to_json(const HybridArc& arc) {
  nlohmann::json doc;
  nlohmann::json dom = nlohmann::json::array();
  for (const auto& s : arc.domain.segments) {
    dom.push_back({{"j", s.j}, {"t_start", s.t_start}, {"t_end", s.t_end}});
  }
  doc["domain"] = dom;

  nlohmann::json segs = nlohmann::json::array();
  for (const auto& seg : arc.segments) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : seg.samples) {
      nlohmann::json item{{"t", s.t}, {"x", vec_to_json(s.x)}};
      if (!s.dx.empty()) item["dx"] = vec_to_json(s.dx);
      samples.push_back(std::move(item));
    }
    segs.push_back({{"j", seg.j}, {"samples", std::move(samples)}});
  }
  doc["segments"] = segs;

  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& jr : arc.jumps) {
    jumps.push_back({{"t", jr.t},
                     {"j", jr.j},
                     {"x_minus", vec_to_json(jr.x_minus)},
                     {"x_plus", vec_to_json(jr.x_plus)}});
  }
  doc["jumps"] = jumps;

  doc["flags"] = {{"t_complete_up_to_horizon", arc.t_complete_up_to_horizon},
                  {"terminated_reason", to_string(arc.terminated_reason)}};
  return doc;
}

HybridArc arc_from_json(const nlohmann::json& doc) {
  HybridArc arc;
  for (const auto& s : doc.at("domain")) {
    arc.domain.segments.push_back(
        {s.at("j").get<int>(), s.at("t_start").get<double>(), s.at("t_end").get<double>()});
  }
  for (const auto& seg : doc.at("segments")) {
    FlowSegment fs;
    fs.j = seg.at("j").get<int>();
    for (const auto& s : seg.at("samples")) {
      FlowSample sample;
      sample.t = s.at("t").get<double>();
      sample.x = vec_from_json(s.at("x"));
      if (s.contains("dx")) sample.dx = vec_from_json(s.at("dx"));
      fs.samples.push_back(std::move(sample));
    }
    arc.segments.push_back(std::move(fs));
  }
  for (const auto& j : doc.at("jumps")) {
    arc.jumps.push_back({j.at("t").get<double>(), j.at("j").get<int>(),
                         vec_from_json(j.at("x_minus")), vec_from_json(j.at("x_plus"))});
  }
  const auto& flags = doc.at("flags");
  arc.t_complete_up_to_horizon = flags.at("t_complete_up_to_horizon").get<bool>();
  arc.terminated_reason =
      termination_reason_from_string(flags.at("terminated_reason").get<std::string>());
  return arc;
}

void write_arc_json(const HybridArc& arc, const std::string& path) {
  auto os = open_out(path);
  os << arc_to_json(arc).dump(2) << "\n";
}

HybridArc read_arc_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  nlohmann::json doc;
  is >> doc;
  return arc_from_json(doc);
}

}  // namespace hybrid
