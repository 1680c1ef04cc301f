#pragma once

// MIQCP and MISOCP models of the discrete coating problem.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "thinfilm/bounds.hpp"
#include "thinfilm/design.hpp"
#include "thinfilm/materials.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/relax.hpp"

namespace thinfilm {

inline constexpr std::array<const char*, 4> kEntryNames{"11", "12", "21", "22"};

/// What a model variable stands for.
struct Symbol {
  enum class Kind { X, U, V, D, F } kind;
  std::size_t layer = 0;       // x: 1-based layer; u: stage 0..N; v: stage n-1
  std::size_t wavelength = 0;  // position in the spectrum
  std::size_t option = 0;      // catalog option (x, v)
  std::size_t entry = 0;       // 0..3 -> 11, 12, 21, 22 (u, v)
};

/// Variable indices of a built model, by symbol.
struct VariableMap {
  std::size_t layers = 0;
  std::size_t wavelengths = 0;
  std::vector<std::vector<std::size_t>> x;                          // [n-1][k]
  std::vector<std::vector<std::array<std::size_t, 4>>> u;           // [l][stage]
  std::vector<std::vector<std::vector<std::array<std::size_t, 4>>>> v;  // [l][n-1][k]
  std::vector<std::size_t> d;
  std::vector<std::size_t> f;
  std::vector<Symbol> symbols;  // per model variable
};

inline std::string thickness_token(double t) {
  auto s = shortest(t);
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

inline std::string x_name(const Catalog& c, std::size_t layer1, std::size_t option) {
  return "x_" + std::to_string(layer1) + "_" + c.material_id(option) + "_" + thickness_token(c.option(option).thickness_nm);
}

enum class ModelKind { Miqcp, Misocp };

/// Per-wavelength affine overapproximators, alpha = (a0, a11, a22, a12, a21).
using HyperplaneSets = std::vector<std::vector<Hyperplane>>;

namespace detail {

struct Builder {
  const Catalog& catalog;
  const EntryBounds& bounds;
  Model model;
  VariableMap map;

  static double entry(const StructuredMatrix& m, std::size_t e) {
    switch (e) {
      case 0: return m.a11;
      case 1: return m.a12;
      case 2: return m.a21;
      default: return m.a22;
    }
  }

  std::size_t add(std::string name, double lo, double hi, Symbol s, VarKind kind = VarKind::Continuous) {
    const auto i = model.add_variable(std::move(name), lo, hi, kind);
    map.symbols.push_back(s);
    return i;
  }

  void variables() {
    const std::size_t N = catalog.layer_count();
    const std::size_t L = catalog.wavelength_count();
    map.layers = N;
    map.wavelengths = L;
    map.x.resize(N);
    map.u.assign(L, std::vector<std::array<std::size_t, 4>>(N + 1));
    map.v.assign(L, std::vector<std::vector<std::array<std::size_t, 4>>>(N));
    for (std::size_t n = 0; n <= N; ++n) {
      if (n > 0) {
        const auto opts = catalog.layer_options(n - 1);
        for (std::size_t o : opts)
          map.x[n - 1].push_back(add(x_name(catalog, n, o), 0.0, 1.0, {Symbol::Kind::X, n, 0, o, 0}, VarKind::Binary));
        for (std::size_t l = 0; l < L; ++l) {
          const auto& box = bounds.at(l, n - 1);
          map.v[l][n - 1].resize(opts.size());
          for (std::size_t k = 0; k < opts.size(); ++k) {
            const auto& o = opts[k];
            for (std::size_t e = 0; e < 4; ++e) {
              const double lo = entry(box.lower, e), hi = entry(box.upper, e);
              map.v[l][n - 1][k][e] =
                  add("v_" + std::to_string(l) + "_" + std::to_string(n - 1) + "_" + catalog.material_id(o) + "_" +
                          thickness_token(catalog.option(o).thickness_nm) + "_" + kEntryNames[e],
                      std::min(0.0, lo), std::max(0.0, hi), {Symbol::Kind::V, n - 1, l, o, e});
            }
          }
        }
      }
      for (std::size_t l = 0; l < L; ++l) {
        const auto& box = bounds.at(l, n);
        if (!box.consistent())
          throw InconsistentBounds("lower bound exceeds upper bound at wavelength " + std::to_string(l) + ", stage " +
                                   std::to_string(n));
        for (std::size_t e = 0; e < 4; ++e)
          map.u[l][n][e] = add("u_" + std::to_string(l) + "_" + std::to_string(n) + "_" + kEntryNames[e],
                               entry(box.lower, e), entry(box.upper, e), {Symbol::Kind::U, n, l, 0, e});
      }
    }
    for (std::size_t l = 0; l < L; ++l) {
      const double dmax = max_denominator_over_box(bounds.at(l, N), catalog.substrate_index(l));
      map.d.push_back(add("d_" + std::to_string(l), 0.0, dmax, {Symbol::Kind::D, 0, l, 0, 0}));
      map.f.push_back(add("f_" + std::to_string(l), 0.0, 1.0, {Symbol::Kind::F, 0, l, 0, 0}));
    }
  }

  void objective() {
    double total = 0.0;
    for (std::size_t l = 0; l < map.wavelengths; ++l) {
      const double phi = catalog.spectrum()[l].weight;
      total += phi;
      model.objective().linear.push_back({map.f[l], -phi});
    }
    model.objective().constant = total;
  }

  void linear_constraints() {
    const std::size_t N = map.layers;
    const auto I = StructuredMatrix::identity();
    for (std::size_t l = 0; l < map.wavelengths; ++l) {
      const std::string ls = std::to_string(l);
      for (std::size_t e = 0; e < 4; ++e)
        model.add_constraint({"init_" + ls + "_" + kEntryNames[e], {{map.u[l][0][e], 1.0}}, {}, Sense::Equal, entry(I, e)});
      for (std::size_t n = 1; n <= N; ++n) {
        const std::string ns = std::to_string(n);
        const auto opts = catalog.layer_options(n - 1);
        for (std::size_t e = 0; e < 4; ++e) {
          Constraint c{"link_" + ls + "_" + ns + "_" + kEntryNames[e], {}, {}, Sense::Equal, 0.0};
          for (std::size_t k = 0; k < opts.size(); ++k) c.linear.push_back({map.v[l][n - 1][k][e], 1.0});
          c.linear.push_back({map.u[l][n - 1][e], -1.0});
          model.add_constraint(std::move(c));
        }
        // sum_k v_k * T_k = u_n, tilde product rule
        std::array<Constraint, 4> prod;
        for (std::size_t e = 0; e < 4; ++e) prod[e] = {"prod_" + ls + "_" + ns + "_" + kEntryNames[e], {}, {}, Sense::Equal, 0.0};
        for (std::size_t k = 0; k < opts.size(); ++k) {
          const auto& T = catalog.matrix(opts[k], l);
          const auto& v = map.v[l][n - 1][k];
          prod[0].linear.push_back({v[0], T.a11});
          prod[0].linear.push_back({v[1], -T.a21});
          prod[1].linear.push_back({v[0], T.a12});
          prod[1].linear.push_back({v[1], T.a22});
          prod[2].linear.push_back({v[2], T.a11});
          prod[2].linear.push_back({v[3], T.a21});
          prod[3].linear.push_back({v[3], T.a22});
          prod[3].linear.push_back({v[2], -T.a12});
        }
        for (std::size_t e = 0; e < 4; ++e) {
          prod[e].linear.push_back({map.u[l][n][e], -1.0});
          model.add_constraint(std::move(prod[e]));
        }
        const auto& box = bounds.at(l, n - 1);
        for (std::size_t k = 0; k < opts.size(); ++k) {
          const auto x = map.x[n - 1][k];
          const std::string tag = ls + "_" + ns + "_" + std::to_string(k) + "_";
          for (std::size_t e = 0; e < 4; ++e) {
            const auto v = map.v[l][n - 1][k][e];
            model.add_constraint(
                {"lo_" + tag + kEntryNames[e], {{v, 1.0}, {x, -entry(box.lower, e)}}, {}, Sense::GreaterEqual, 0.0});
            model.add_constraint(
                {"hi_" + tag + kEntryNames[e], {{v, 1.0}, {x, -entry(box.upper, e)}}, {}, Sense::LessEqual, 0.0});
          }
        }
      }
    }
    for (std::size_t n = 1; n <= N; ++n) {
      Constraint c{"one_" + std::to_string(n), {}, {}, Sense::Equal, 1.0};
      for (auto x : map.x[n - 1]) c.linear.push_back({x, 1.0});
      model.add_constraint(std::move(c));
    }
  }

  void cone_constraints() {
    for (std::size_t l = 0; l < map.wavelengths; ++l)
      model.add_constraint({"soc_" + std::to_string(l), {}, {{map.f[l], map.d[l], 1.0}}, Sense::GreaterEqual,
                            4.0 * catalog.substrate_index(l).re});
  }

  // d - D(w) <= 0 written as d + [-(quadratic part)] <= 2n
  void reverse_convex_constraints() {
    const std::size_t N = map.layers;
    for (std::size_t l = 0; l < map.wavelengths; ++l) {
      const auto s = catalog.substrate_index(l);
      const auto& u = map.u[l][N];
      const auto w11 = u[0], w12 = u[1], w21 = u[2], w22 = u[3];
      const double nk = s.re * s.re + s.im * s.im;
      Constraint c{"rev_" + std::to_string(l), {{map.d[l], 1.0}}, {}, Sense::LessEqual, 2.0 * s.re};
      c.quadratic = {{w11, w11, -1.0},          {w11, w12, 2.0 * s.im}, {w12, w12, -nk},
                     {w21, w21, -1.0},          {w21, w22, -2.0 * s.im}, {w22, w22, -nk}};
      model.add_constraint(std::move(c));
    }
  }

  void overapproximator_constraints(const HyperplaneSets& planes) {
    const std::size_t N = map.layers;
    if (planes.size() != map.wavelengths) throw MissingHyperplanes("one hyperplane set per wavelength required");
    for (std::size_t l = 0; l < map.wavelengths; ++l) {
      if (planes[l].empty()) throw MissingHyperplanes("no hyperplanes at wavelength " + std::to_string(l));
      const auto& u = map.u[l][N];
      for (std::size_t h = 0; h < planes[l].size(); ++h) {
        const auto& a = planes[l][h].alpha;
        model.add_constraint({"ovr_" + std::to_string(l) + "_" + std::to_string(h),
                              {{u[0], a[1]}, {u[3], a[2]}, {u[1], a[3]}, {u[2], a[4]}, {map.d[l], -1.0}},
                              {},
                              Sense::GreaterEqual,
                              -a[0]});
      }
    }
  }

  void header(ModelKind kind) {
    auto& h = model.header();
    h.push_back(kind == ModelKind::Miqcp ? "thin-film coating MIQCP" : "thin-film coating MISOCP relaxation");
    h.push_back("substrate " + catalog.substrate_id() + ", layers " + std::to_string(catalog.layer_count()) +
                ", wavelengths " + std::to_string(catalog.wavelength_count()));
    std::string ws = "wavelength positions (l):";
    for (std::size_t l = 0; l < catalog.wavelength_count(); ++l)
      ws += " " + std::to_string(l) + "=" + shortest(catalog.spectrum()[l].wavelength_nm);
    h.push_back(ws);
    h.push_back("x_n_m_t: layer n (1 = next to substrate) uses material m at thickness t nm (p = decimal point)");
    h.push_back("u_l_s_ij: entry ij of the cumulative matrix after s layers at wavelength l; w = u_l_N");
    h.push_back("v_l_s_m_t_ij: copy of u_l_s_ij gated by x_(s+1)_m_t");
    h.push_back("d_l, f_l: reflectance denominator and 4 Re(n_s) / d at wavelength l");
  }
};

}  // namespace detail

struct BuiltModel {
  Model model;
  VariableMap map;
};

/// Exact nonconvex model; maximize sum phi (1 - f).
inline BuiltModel build_miqcp(const Catalog& catalog, const EntryBounds& bounds) {
  detail::Builder b{catalog, bounds, {}, {}};
  b.header(ModelKind::Miqcp);
  b.variables();
  b.objective();
  b.linear_constraints();
  b.cone_constraints();
  b.reverse_convex_constraints();
  return {std::move(b.model), std::move(b.map)};
}

/// Relaxation with d bounded by affine overapproximators of D.
inline BuiltModel build_misocp(const Catalog& catalog, const EntryBounds& bounds, const HyperplaneSets& planes) {
  detail::Builder b{catalog, bounds, {}, {}};
  b.header(ModelKind::Misocp);
  b.variables();
  b.objective();
  b.linear_constraints();
  b.cone_constraints();
  b.overapproximator_constraints(planes);
  return {std::move(b.model), std::move(b.map)};
}

/// Overapproximators of D on the final-stage box at every wavelength.
inline std::vector<Overapproximation> overapproximators_for(const Catalog& catalog, const EntryBounds& bounds,
                                                            const OverapproxLimits& limits = {}) {
  std::vector<Overapproximation> out;
  for (std::size_t l = 0; l < catalog.wavelength_count(); ++l)
    out.push_back(overapproximators_or_fallback(Box4::from_entries(bounds.at(l, catalog.layer_count())),
                                                catalog.substrate_index(l), l, limits));
  return out;
}

inline HyperplaneSets planes_of(const std::vector<Overapproximation>& sets) {
  HyperplaneSets out;
  for (const auto& s : sets) out.push_back(s.planes);
  return out;
}

/// Linear constraints of either model before any overapproximator rows.
inline std::size_t expected_linear_constraints(const Catalog& catalog) {
  std::size_t choices = 0;
  for (std::size_t n = 0; n < catalog.layer_count(); ++n) choices += catalog.layer_options(n).size();
  const std::size_t N = catalog.layer_count();
  return catalog.wavelength_count() * (4 + 8 * N + 8 * choices) + N;
}

/// Point of the model induced by a design: u, v propagated, d = D(w), f = 4 Re / d.
inline std::vector<double> assignment_for_design(const BuiltModel& built, const Catalog& catalog,
                                                 const std::vector<std::size_t>& options) {
  const auto& map = built.map;
  if (options.size() != map.layers) throw InadmissibleDesign("design length does not match the model");
  std::vector<double> val(built.model.variables().size(), 0.0);
  for (std::size_t n = 0; n < map.layers; ++n) {
    const auto opts = catalog.layer_options(n);
    const auto it = std::find(opts.begin(), opts.end(), options[n]);
    if (it == opts.end()) throw InadmissibleDesign("option not admissible at layer " + std::to_string(n + 1));
    val[map.x[n][static_cast<std::size_t>(it - opts.begin())]] = 1.0;
  }
  for (std::size_t l = 0; l < map.wavelengths; ++l) {
    StructuredMatrix u = StructuredMatrix::identity();
    auto put = [&](const std::array<std::size_t, 4>& idx, const StructuredMatrix& m) {
      for (std::size_t e = 0; e < 4; ++e) val[idx[e]] = detail::Builder::entry(m, e);
    };
    put(map.u[l][0], u);
    for (std::size_t n = 0; n < map.layers; ++n) {
      const auto opts = catalog.layer_options(n);
      for (std::size_t k = 0; k < opts.size(); ++k)
        if (opts[k] == options[n]) put(map.v[l][n][k], u);
      u = multiply(u, catalog.matrix(options[n], l));
      put(map.u[l][n + 1], u);
    }
    const auto s = catalog.substrate_index(l);
    const double d = denominator_d(u, s);
    val[map.d[l]] = d;
    val[map.f[l]] = 4.0 * s.re / d;
  }
  return val;
}

inline std::map<std::string, double, std::less<>> read_solution_values(std::istream& in) {
  std::map<std::string, double, std::less<>> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream ss{std::string(t)};
    std::string name, value;
    if (!(ss >> name >> value)) throw ParseError("solution line " + std::to_string(line_no) + ": expected name value");
    const auto v = detail::parse_double(value);
    if (!v) throw ParseError("solution line " + std::to_string(line_no) + ": bad value '" + value + "'");
    values[name] = *v;
  }
  return values;
}

/// Decode the binaries of a solution; exactly one x >= 0.5 per layer.
inline Design decode_solution(const std::map<std::string, double, std::less<>>& values, const Catalog& catalog) {
  std::vector<std::size_t> chosen;
  for (std::size_t n = 0; n < catalog.layer_count(); ++n) {
    std::optional<std::size_t> pick;
    for (std::size_t o : catalog.layer_options(n)) {
      const auto it = values.find(x_name(catalog, n + 1, o));
      if (it == values.end() || it->second < 0.5) continue;
      if (pick) throw InfeasibleAssignment("layer " + std::to_string(n + 1) + " has more than one selected choice");
      pick = o;
    }
    if (!pick) throw InfeasibleAssignment("layer " + std::to_string(n + 1) + " has no selected choice");
    chosen.push_back(*pick);
  }
  return design_from_options(catalog, chosen);
}

inline Design import_solution(const std::filesystem::path& path, const Catalog& catalog) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return decode_solution(read_solution_values(in), catalog);
}

/// Solution file text (name value per line) for a model point.
inline std::string solution_text(const Model& m, const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < m.variables().size(); ++i)
    out += m.variables()[i].name + " " + lp::number(values[i]) + "\n";
  return out;
}

}  // namespace thinfilm
