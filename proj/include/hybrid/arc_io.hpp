#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hybrid/arc.hpp"

namespace hybrid {

/// CSV trace with header t,j,x0,...,x{n-1}; 17 significant digits. Jump
/// instants appear as two consecutive rows with equal t (j and j+1).
void arc_to_csv(const HybridArc& arc, std::ostream& os);
void write_arc_csv(const HybridArc& arc, const std::string& path);

/// JSON document with keys domain, segments, jumps, flags. Doubles use the
/// shortest round-trip representation, so dump -> parse is bit exact.
nlohmann::json arc_to_json(const HybridArc& arc);
HybridArc arc_from_json(const nlohmann::json& doc);
void write_arc_json(const HybridArc& arc, const std::string& path);
HybridArc read_arc_json(const std::string& path);

}  // namespace hybrid
