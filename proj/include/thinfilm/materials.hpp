#pragma once

// Dispersion tables, interpolation, and the per-layer choice catalog with its
// precomputed fixed transfer matrices.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "thinfilm/errors.hpp"
#include "thinfilm/optics.hpp"

namespace thinfilm {

struct DispersionRow {
  double wavelength_nm;
  double n;
  double k;
};

struct DispersionTable {
  std::string material_id;
  std::vector<DispersionRow> rows;

  double first_wavelength() const { return rows.front().wavelength_nm; }
  double last_wavelength() const { return rows.back().wavelength_nm; }
  bool covers(double wavelength_nm) const {
    return !rows.empty() && wavelength_nm >= first_wavelength() && wavelength_nm <= last_wavelength();
  }
};

inline void validate(const DispersionTable& table) {
  if (table.rows.size() < 2) throw ValidationError(table.material_id + ": need at least 2 rows");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (!(r.n > 0.0)) throw ValidationError(table.material_id + ": n must be > 0");
    if (!(r.k >= 0.0)) throw ValidationError(table.material_id + ": k must be >= 0");
    if (i > 0 && !(r.wavelength_nm > table.rows[i - 1].wavelength_nm))
      throw ValidationError(table.material_id + ": wavelengths must be strictly increasing");
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parse CSV text with header `wavelength_nm,n,k`.
inline DispersionTable parse_dispersion(std::istream& in, std::string material_id) {
  DispersionTable table{std::move(material_id), {}};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    if (!header_seen) {
      if (body != "wavelength_nm,n,k")
        throw ParseError(table.material_id + ": expected header 'wavelength_nm,n,k'");
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      fields.push_back(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 3)
      throw ParseError(table.material_id + ": line " + std::to_string(line_no) + " must have 3 fields");
    const auto l = detail::parse_double(fields[0]);
    const auto n = detail::parse_double(fields[1]);
    const auto k = detail::parse_double(fields[2]);
    if (!l || !n || !k)
      throw ParseError(table.material_id + ": line " + std::to_string(line_no) + " is not numeric");
    table.rows.push_back({*l, *n, *k});
  }
  if (!header_seen) throw ParseError(table.material_id + ": empty file");
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const DispersionRow& a, const DispersionRow& b) { return a.wavelength_nm < b.wavelength_nm; });
  validate(table);
  return table;
}

/// Load `<path>`; the material id is the file stem.
inline DispersionTable load_dispersion(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_dispersion(in, path.stem().string());
}

/// Linear interpolation of n and k in wavelength.
inline ComplexIndex index_at(const DispersionTable& table, double wavelength_nm) {
  if (!table.covers(wavelength_nm))
    throw OutOfRange(table.material_id + ": " + std::to_string(wavelength_nm) + " nm outside table");
  const auto& rows = table.rows;
  auto hi = std::lower_bound(rows.begin(), rows.end(), wavelength_nm,
                             [](const DispersionRow& r, double l) { return r.wavelength_nm < l; });
  if (hi->wavelength_nm == wavelength_nm) return {hi->n, hi->k};
  auto lo = hi - 1;
  const double t = (wavelength_nm - lo->wavelength_nm) / (hi->wavelength_nm - lo->wavelength_nm);
  return {lo->n + t * (hi->n - lo->n), lo->k + t * (hi->k - lo->k)};
}

using DispersionLibrary = std::map<std::string, DispersionTable, std::less<>>;

inline const DispersionTable& lookup(const DispersionLibrary& lib, std::string_view id) {
  const auto it = lib.find(id);
  if (it == lib.end()) throw MissingDispersion("no dispersion table for '" + std::string(id) + "'");
  return it->second;
}

/// Load `<dir>/<id>.csv` for every id.
inline DispersionLibrary load_library(const std::filesystem::path& dir,
                                      const std::vector<std::string>& ids) {
  DispersionLibrary lib;
  for (const auto& id : ids) {
    const auto path = dir / (id + ".csv");
    if (!std::filesystem::exists(path)) throw MissingDispersion("missing " + path.string());
    auto table = load_dispersion(path);
    lib.emplace(id, std::move(table));
  }
  return lib;
}

/// `start, start+step, ..., end` with the count rounded so `end` is included.
inline std::vector<double> arithmetic_progression(double start, double step, double end) {
  if (!(step > 0.0)) throw ValidationError("progression step must be > 0");
  if (end < start) throw ValidationError("progression end precedes start");
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

struct CatalogConfig {
  std::string substrate;
  std::vector<std::string> materials;
  std::map<std::string, std::vector<double>> thicknesses;
  std::vector<double> wavelengths;
  std::vector<double> weights;  // empty means uniform
  bool alternating = false;
  std::optional<std::string> high_index;
  std::optional<std::string> low_index;
  std::size_t layers = 0;
  std::filesystem::path dispersion_dir;
};

namespace detail {

inline std::vector<double> number_list(const nlohmann::json& j, const char* what) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) throw ValidationError(std::string(what) + ": expected numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  if (j.is_object() && j.contains("start") && j.contains("step") && j.contains("end"))
    return arithmetic_progression(j["start"].get<double>(), j["step"].get<double>(),
                                  j["end"].get<double>());
  if (j.is_number()) return {j.get<double>()};
  throw ValidationError(std::string(what) + ": expected a list or {start, step, end}");
}

}  // namespace detail

inline CatalogConfig parse_catalog_config(const nlohmann::json& j,
                                          const std::filesystem::path& base_dir = {}) {
  try {
    CatalogConfig c;
    c.substrate = j.at("substrate").get<std::string>();
    c.materials = j.at("materials").get<std::vector<std::string>>();
    if (c.materials.empty()) throw ValidationError("materials list is empty");
    for (const auto& m : c.materials) {
      auto list = detail::number_list(j.at("thicknesses").at(m), "thicknesses");
      std::sort(list.begin(), list.end());
      if (std::adjacent_find(list.begin(), list.end()) != list.end())
        throw ValidationError("duplicate thickness for " + m);
      for (double t : list)
        if (!(t > 0.0)) throw ValidationError("thicknesses must be > 0 for " + m);
      c.thicknesses[m] = std::move(list);
    }
    c.wavelengths = detail::number_list(j.at("wavelengths"), "wavelengths");
    if (j.contains("weights")) c.weights = detail::number_list(j["weights"], "weights");
    c.alternating = j.value("alternating", false);
    if (j.contains("high_index")) c.high_index = j["high_index"].get<std::string>();
    if (j.contains("low_index")) c.low_index = j["low_index"].get<std::string>();
    c.layers = j.at("layers").get<std::size_t>();
    const auto dir = std::filesystem::path(j.value("dispersion_dir", std::string("data/dispersion")));
    c.dispersion_dir = dir.is_absolute() || base_dir.empty() ? dir : base_dir / dir;
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("catalog config: ") + e.what());
  }
}

inline CatalogConfig load_catalog_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_catalog_config(j, path.parent_path());
}

/// One admissible (material, thickness) choice.
struct LayerOption {
  std::size_t material;  // index into Catalog::materials()
  double thickness_nm;
};

/// Coating material as the catalog sees it: real index per spectrum sample.
struct CoatingMaterial {
  std::string id;
  std::vector<double> index;  // n at each spectrum wavelength
  std::vector<double> thicknesses_nm;
};

/// Admissible choices per layer and the fixed transfer matrices for every
/// (option, wavelength) pair. Layers are 0-based here; position 0 is the
/// first coated layer. Options are ordered by (material id, thickness), so
/// option index order is the design tie-break order.
class Catalog {
 public:
  Catalog(std::size_t layer_count, Spectrum spectrum, std::string substrate_id,
          std::vector<ComplexIndex> substrate_index, std::vector<CoatingMaterial> materials,
          std::vector<std::vector<std::string>> layer_materials)
      : layers_(layer_count),
        spectrum_(std::move(spectrum)),
        substrate_id_(std::move(substrate_id)),
        substrate_index_(std::move(substrate_index)) {
    if (substrate_index_.size() != spectrum_.size())
      throw MismatchedSpectrumLength("substrate index per wavelength");
    for (const auto& s : substrate_index_)
      if (!(s.re > 0.0) || !(s.im >= 0.0)) throw ValidationError("substrate index must have re > 0, im >= 0");
    if (layer_materials.size() != layers_) throw ValidationError("one material set per layer");

    std::sort(materials.begin(), materials.end(),
              [](const CoatingMaterial& a, const CoatingMaterial& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < materials.size(); ++i)
      if (materials[i].id == materials[i - 1].id) throw ValidationError("duplicate material " + materials[i].id);

    // keep only materials admissible somewhere
    std::vector<bool> used(materials.size(), false);
    for (const auto& set : layer_materials) {
      if (set.empty()) throw ValidationError("every layer needs at least one material");
      for (const auto& id : set) {
        const auto it = std::find_if(materials.begin(), materials.end(),
                                     [&](const CoatingMaterial& m) { return m.id == id; });
        if (it == materials.end()) throw MissingDispersion("layer references unknown material " + id);
        used[static_cast<std::size_t>(it - materials.begin())] = true;
      }
    }
    for (std::size_t i = 0; i < materials.size(); ++i)
      if (used[i]) materials_.push_back(std::move(materials[i]));

    for (std::size_t m = 0; m < materials_.size(); ++m) {
      auto& mat = materials_[m];
      if (mat.index.size() != spectrum_.size()) throw MismatchedSpectrumLength("material index per wavelength");
      if (mat.thicknesses_nm.empty()) throw ValidationError("no thicknesses for " + mat.id);
      std::sort(mat.thicknesses_nm.begin(), mat.thicknesses_nm.end());
      for (std::size_t t = 0; t < mat.thicknesses_nm.size(); ++t) {
        if (!(mat.thicknesses_nm[t] > 0.0)) throw ValidationError("thickness must be > 0");
        if (t > 0 && mat.thicknesses_nm[t] == mat.thicknesses_nm[t - 1])
          throw ValidationError("duplicate thickness for " + mat.id);
        options_.push_back({m, mat.thicknesses_nm[t]});
      }
    }

    matrices_.resize(options_.size() * spectrum_.size());
    for (std::size_t o = 0; o < options_.size(); ++o) {
      const auto& mat = materials_[options_[o].material];
      for (std::size_t l = 0; l < spectrum_.size(); ++l)
        matrices_[o * spectrum_.size() + l] =
            make_transfer_matrix({mat.index[l], 0.0}, options_[o].thickness_nm, spectrum_[l].wavelength_nm);
    }

    layer_options_.resize(layers_);
    for (std::size_t n = 0; n < layers_; ++n) {
      for (std::size_t o = 0; o < options_.size(); ++o) {
        const auto& id = materials_[options_[o].material].id;
        if (std::find(layer_materials[n].begin(), layer_materials[n].end(), id) != layer_materials[n].end())
          layer_options_[n].push_back(o);
      }
    }
  }

  std::size_t layer_count() const { return layers_; }
  const Spectrum& spectrum() const { return spectrum_; }
  std::size_t wavelength_count() const { return spectrum_.size(); }
  const std::string& substrate_id() const { return substrate_id_; }
  ComplexIndex substrate_index(std::size_t l) const { return substrate_index_[l]; }
  std::span<const ComplexIndex> substrate_indices() const { return substrate_index_; }
  std::span<const CoatingMaterial> materials() const { return materials_; }
  std::span<const LayerOption> options() const { return options_; }
  const LayerOption& option(std::size_t o) const { return options_[o]; }
  const std::string& material_id(std::size_t o) const { return materials_[options_[o].material].id; }
  std::span<const std::size_t> layer_options(std::size_t layer) const { return layer_options_[layer]; }

  const StructuredMatrix& matrix(std::size_t option, std::size_t l) const {
    return matrices_[option * spectrum_.size() + l];
  }

  /// Number of precomputed fixed transfer matrices.
  std::size_t matrix_count() const { return matrices_.size(); }

  /// Product of per-layer choice counts, saturating at SIZE_MAX.
  std::size_t design_count() const {
    std::size_t total = 1;
    for (const auto& opts : layer_options_) {
      if (opts.empty()) return 0;
      if (total > std::numeric_limits<std::size_t>::max() / opts.size()) return std::numeric_limits<std::size_t>::max();
      total *= opts.size();
    }
    return total;
  }

  std::optional<std::size_t> find_option(std::string_view material, double thickness_nm,
                                         double tol = 1e-9) const {
    for (std::size_t o = 0; o < options_.size(); ++o)
      if (material_id(o) == material && std::abs(options_[o].thickness_nm - thickness_nm) <= tol) return o;
    return std::nullopt;
  }

  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  std::size_t layers_;
  Spectrum spectrum_;
  std::string substrate_id_;
  std::vector<ComplexIndex> substrate_index_;
  std::vector<CoatingMaterial> materials_;
  std::vector<LayerOption> options_;
  std::vector<StructuredMatrix> matrices_;
  std::vector<std::vector<std::size_t>> layer_options_;
  std::vector<std::string> warnings_;
};

inline Spectrum spectrum_of(const CatalogConfig& config) {
  if (config.wavelengths.empty()) throw ValidationError("no wavelengths");
  return config.weights.empty() ? Spectrum::uniform(config.wavelengths)
                                : Spectrum::weighted(config.wavelengths, config.weights);
}

/// Catalog for `config`. In alternating mode layer 1, 3, 5, ... take the
/// high-index material and layers 2, 4, ... the low-index one.
inline Catalog build_catalog(const CatalogConfig& config, const DispersionLibrary& library) {
  if (config.layers == 0) throw ValidationError("layers must be >= 1");
  const Spectrum spectrum = spectrum_of(config);

  auto sample = [&](const DispersionTable& table) {
    std::vector<ComplexIndex> out;
    for (const auto& s : spectrum) {
      if (!table.covers(s.wavelength_nm))
        throw SpectrumCoverage(table.material_id + " does not cover " + std::to_string(s.wavelength_nm) + " nm");
      out.push_back(index_at(table, s.wavelength_nm));
    }
    return out;
  };

  std::vector<std::string> warnings;
  const auto substrate = sample(lookup(library, config.substrate));
  std::vector<CoatingMaterial> materials;
  for (const auto& id : config.materials) {
    const auto idx = sample(lookup(library, id));
    CoatingMaterial m{id, {}, config.thicknesses.at(id)};
    bool absorbing = false;
    for (const auto& c : idx) {
      m.index.push_back(c.re);
      absorbing = absorbing || c.im > 0.0;
    }
    if (absorbing) warnings.push_back(id + ": nonzero extinction in dispersion data ignored (k = 0 used)");
    materials.push_back(std::move(m));
  }

  std::vector<std::vector<std::string>> layer_materials(config.layers);
  if (config.alternating) {
    if (config.materials.size() != 2) throw ValidationError("alternating mode needs exactly two materials");
    std::string high = config.high_index.value_or("");
    std::string low = config.low_index.value_or("");
    if (high.empty() || low.empty()) {
      auto mean_n = [](const CoatingMaterial& m) {
        double s = 0.0;
        for (double v : m.index) s += v;
        return s / static_cast<double>(m.index.size());
      };
      const bool first_high = mean_n(materials[0]) >= mean_n(materials[1]);
      if (high.empty()) high = first_high ? materials[0].id : materials[1].id;
      if (low.empty()) low = first_high ? materials[1].id : materials[0].id;
    }
    for (std::size_t n = 0; n < config.layers; ++n) layer_materials[n] = {n % 2 == 0 ? high : low};
  } else {
    for (auto& set : layer_materials) set = config.materials;
  }

  Catalog catalog(config.layers, spectrum, config.substrate, substrate, std::move(materials),
                  std::move(layer_materials));
  for (auto& w : warnings) catalog.add_warning(std::move(w));
  return catalog;
}

}  // namespace thinfilm
