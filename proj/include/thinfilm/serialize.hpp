#pragma once

// JSON forms of designs, reports, bounds, hyperplanes, and variable maps.

#include <string>
#include <vector>

#include <json.hpp>

#include "thinfilm/bounds.hpp"
#include "thinfilm/design.hpp"
#include "thinfilm/formulation.hpp"
#include "thinfilm/relax.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

using nlohmann::json;

inline json design_to_json(const Design& d) {
  json out = json::array();
  for (const auto& layer : d) out.push_back({{"material", layer.material}, {"thickness_nm", layer.thickness_nm}});
  return out;
}

inline Design design_from_json(const json& j) {
  try {
    const json& layers = j.is_object() && j.contains("design") ? j.at("design") : j;
    if (!layers.is_array()) throw ParseError("design: expected a list of layers");
    Design d;
    for (const auto& e : layers) d.push_back({e.at("material").get<std::string>(), e.at("thickness_nm").get<double>()});
    return d;
  } catch (const json::exception& e) {
    throw ParseError(std::string("design: ") + e.what());
  }
}

inline Design load_design(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return design_from_json(j);
}

inline json report_to_json(const SolveReport& r) {
  return {{"method", r.method},
          {"objective", r.objective},
          {"design", design_to_json(r.design)},
          {"nodes_explored", r.nodes_explored},
          {"nodes_pruned", r.nodes_pruned},
          {"leaves", r.leaves},
          {"wall_seconds", r.wall_seconds},
          {"proven_optimal", r.proven_optimal},
          {"incumbent_trace", r.incumbent_trace}};
}

inline json box_to_json(const EntryBox& b) {
  const auto& lo = b.lower;
  const auto& hi = b.upper;
  return {{"11", {lo.a11, hi.a11}}, {"12", {lo.a12, hi.a12}}, {"21", {lo.a21, hi.a21}}, {"22", {lo.a22, hi.a22}}};
}

/// Per wavelength, per stage 0..N: entry -> [lower, upper].
inline json bounds_to_json(const Catalog& c, const EntryBounds& b) {
  json out = json::array();
  for (std::size_t l = 0; l < b.wavelength_count(); ++l) {
    json stages = json::array();
    for (std::size_t n = 0; n <= b.layer_count(); ++n) stages.push_back(box_to_json(b.at(l, n)));
    out.push_back({{"wavelength_nm", c.spectrum()[l].wavelength_nm}, {"stages", stages}});
  }
  return out;
}

inline json hyperplanes_to_json(const Catalog& c, const std::vector<Overapproximation>& sets) {
  json out = json::array();
  for (std::size_t l = 0; l < sets.size(); ++l) {
    json planes = json::array();
    for (const auto& h : sets[l].planes) planes.push_back(h.alpha);
    out.push_back({{"wavelength_nm", c.spectrum()[l].wavelength_nm},
                   {"candidates", sets[l].candidates.size()},
                   {"subsets_tried", sets[l].subsets_tried},
                   {"fallback", sets[l].fallback},
                   {"alpha", planes}});
  }
  return out;
}

inline json variable_map_to_json(const Catalog& c, const BuiltModel& b) {
  static constexpr const char* kinds[] = {"x", "u", "v", "d", "f"};
  json vars = json::array();
  for (std::size_t i = 0; i < b.model.variables().size(); ++i) {
    const auto& s = b.map.symbols[i];
    json e{{"name", b.model.variables()[i].name}, {"symbol", kinds[static_cast<int>(s.kind)]}};
    switch (s.kind) {
      case Symbol::Kind::X:
        e["layer"] = s.layer;
        e["material"] = c.material_id(s.option);
        e["thickness_nm"] = c.option(s.option).thickness_nm;
        break;
      case Symbol::Kind::U:
        e["stage"] = s.layer;
        e["wavelength_nm"] = c.spectrum()[s.wavelength].wavelength_nm;
        e["entry"] = kEntryNames[s.entry];
        break;
      case Symbol::Kind::V:
        e["stage"] = s.layer;
        e["wavelength_nm"] = c.spectrum()[s.wavelength].wavelength_nm;
        e["material"] = c.material_id(s.option);
        e["thickness_nm"] = c.option(s.option).thickness_nm;
        e["entry"] = kEntryNames[s.entry];
        break;
      case Symbol::Kind::D:
      case Symbol::Kind::F:
        e["wavelength_nm"] = c.spectrum()[s.wavelength].wavelength_nm;
        break;
    }
    vars.push_back(std::move(e));
  }
  return {{"layers", b.map.layers}, {"wavelengths_nm", c.spectrum().wavelengths()}, {"variables", vars}};
}

}  // namespace thinfilm
