#pragma once

// Quarter-wave stacking baseline.

#include <algorithm>
#include <string>
#include <vector>

#include "thinfilm/design.hpp"
#include "thinfilm/materials.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

enum class StackOrder { Ascending, Descending };

struct StackSpec {
  std::vector<double> targets_nm;
  std::size_t layers_per_wavelength = 1;
  std::string high;
  std::string low;
  StackOrder order = StackOrder::Ascending;

  void validate() const {
    if (targets_nm.empty()) throw ValidationError("no target wavelengths");
    for (double t : targets_nm)
      if (!(t > 0.0)) throw NonPositiveWavelength("target wavelength must be > 0");
    if (layers_per_wavelength < 1 || layers_per_wavelength > 7)
      throw ValidationError("layers per wavelength must be in 1..7");
  }
};

/// Per target a film of alternating high/low quarter-wave layers starting
/// with high; films stacked outward from the substrate in `order`.
inline Design quarter_wave_design(const StackSpec& spec, const DispersionLibrary& library) {
  spec.validate();
  const auto& high = lookup(library, spec.high);
  const auto& low = lookup(library, spec.low);
  auto targets = spec.targets_nm;
  std::sort(targets.begin(), targets.end());
  if (spec.order == StackOrder::Descending) std::reverse(targets.begin(), targets.end());
  Design d;
  for (double lambda : targets) {
    for (std::size_t i = 0; i < spec.layers_per_wavelength; ++i) {
      const auto& table = i % 2 == 0 ? high : low;
      if (!table.covers(lambda))
        throw MissingDispersion(table.material_id + " has no data at " + std::to_string(lambda) + " nm");
      d.push_back({table.material_id, lambda / (4.0 * index_at(table, lambda).re)});
    }
  }
  return d;
}

inline Spectrum visible_grid(double step = 10.0) { return Spectrum::uniform(arithmetic_progression(380.0, step, 770.0)); }
inline Spectrum broad_grid(double step = 20.0) { return Spectrum::uniform(arithmetic_progression(300.0, step, 3000.0)); }

struct NamedDesign {
  std::string name;
  Design design;
};

struct ComparisonRow {
  std::string name;
  double visible = 0.0;
  double broad = 0.0;
  std::size_t layers = 0;
};

inline std::vector<ComparisonRow> compare_methods(std::string_view substrate, const DispersionLibrary& library,
                                                  const std::vector<NamedDesign>& designs,
                                                  const Spectrum& visible = visible_grid(),
                                                  const Spectrum& broad = broad_grid()) {
  std::vector<ComparisonRow> rows;
  for (const auto& nd : designs)
    rows.push_back({nd.name, evaluate_on_grid(nd.design, substrate, library, visible).average,
                    evaluate_on_grid(nd.design, substrate, library, broad).average, nd.design.size()});
  return rows;
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "name,visible_average,broad_average,layers\n";
  for (const auto& r : rows)
    out += r.name + "," + lp::number(r.visible) + "," + lp::number(r.broad) + "," + std::to_string(r.layers) + "\n";
  return out;
}

}  // namespace thinfilm
