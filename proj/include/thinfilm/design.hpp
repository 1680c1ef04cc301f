#pragma once

#include <algorithm>
#include <charconv>
#include <string>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/materials.hpp"

namespace thinfilm {

struct DesignLayer {
  std::string material;
  double thickness_nm;

  friend bool operator==(const DesignLayer&, const DesignLayer&) = default;
};

/// Coating stack; element 0 is layer 1, the first coated layer.
using Design = std::vector<DesignLayer>;

inline Design design_from_options(const Catalog& catalog, const std::vector<std::size_t>& options) {
  Design d;
  d.reserve(options.size());
  for (std::size_t o : options) d.push_back({catalog.material_id(o), catalog.option(o).thickness_nm});
  return d;
}

/// Option index per layer; throws InadmissibleDesign for a choice the catalog
/// does not allow at that layer.
inline std::vector<std::size_t> options_of_design(const Catalog& catalog, const Design& design) {
  if (design.size() != catalog.layer_count())
    throw InadmissibleDesign("design has " + std::to_string(design.size()) + " layers, catalog has " +
                             std::to_string(catalog.layer_count()));
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < design.size(); ++n) {
    const auto o = catalog.find_option(design[n].material, design[n].thickness_nm);
    const auto allowed = catalog.layer_options(n);
    if (!o || std::find(allowed.begin(), allowed.end(), *o) == allowed.end())
      throw InadmissibleDesign("layer " + std::to_string(n + 1) + ": " + design[n].material + " at " +
                               std::to_string(design[n].thickness_nm) + " nm is not admissible");
    out.push_back(*o);
  }
  return out;
}

/// Shortest round-trip decimal representation.
inline std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace thinfilm
