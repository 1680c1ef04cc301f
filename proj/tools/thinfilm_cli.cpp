#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thinfilm/thinfilm.hpp"

namespace fs = std::filesystem;
using namespace thinfilm;

namespace {

struct Grid {
  double start, step, end;
};

Grid parse_grid(const std::string& s) {
  Grid g{};
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%lf%c", &g.start, &g.step, &g.end, &tail) != 3)
    throw InvalidArgument("grid must be start:step:end, got '" + s + "'");
  if (!(g.step > 0.0)) throw InvalidArgument("grid step must be > 0");
  return g;
}

Interval parse_interval(const std::string& s) {
  Interval iv{};
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf%c", &iv.lo, &iv.hi, &tail) != 2 || iv.lo > iv.hi)
    throw InvalidArgument("interval must be lo:hi, got '" + s + "'");
  return iv;
}

struct Context {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 42;

  CatalogConfig config() const {
    if (config_path.empty()) throw InvalidArgument("--config is required");
    return load_catalog_config(config_path);
  }

  DispersionLibrary library(const CatalogConfig& c, const Design& extra = {}) const {
    std::set<std::string> ids{c.substrate};
    ids.insert(c.materials.begin(), c.materials.end());
    for (const auto& layer : extra) ids.insert(layer.material);
    return load_library(c.dispersion_dir, std::vector<std::string>(ids.begin(), ids.end()));
  }

  fs::path out(const std::string& name) const {
    fs::create_directories(out_dir);
    return fs::path(out_dir) / name;
  }

  void write(const std::string& name, const std::string& text) const {
    const auto p = out(name);
    write_file_atomically(p, text);
    std::cout << "wrote " << p.string() << "\n";
  }

  void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }
};

Catalog catalog_for(const Context& ctx) {
  const auto c = ctx.config();
  auto cat = build_catalog(c, ctx.library(c));
  for (const auto& w : cat.warnings()) std::cerr << "warning: " << w << "\n";
  return cat;
}

std::string round3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

int run(int argc, char** argv) {
  CLI::App app{"Design and evaluate multi-layer dielectric coatings on metallic substrates"};
  app.require_subcommand(1);
  Context ctx;
  app.add_option("--config", ctx.config_path, "Catalog config (JSON)");
  app.add_option("--out", ctx.out_dir, "Output directory");
  app.add_option("--seed", ctx.seed, "Seed for randomized components");

  std::string design_path;
  std::string grid_text = "300:10:3000";
  auto* evaluate = app.add_subcommand("evaluate", "Reflectance spectrum and window averages of a design");
  evaluate->add_option("--design", design_path, "Design JSON (omit for the bare substrate)");
  evaluate->add_option("--grid", grid_text, "Spectrum grid start:step:end in nm");

  std::string mode = "bnb";
  std::uint64_t cap_nodes = 0;
  unsigned threads = 1;
  auto* optimize = app.add_subcommand("optimize", "Exact optimum over the catalog");
  optimize->add_option("--mode", mode, "brute or bnb")->check(CLI::IsMember({"brute", "bnb"}));
  optimize->add_option("--cap-nodes", cap_nodes, "Node cap (bnb) or design cap (brute); 0 = default");
  optimize->add_option("--threads", threads, "Worker threads for bnb");

  std::string kind = "miqcp";
  auto* exportc = app.add_subcommand("export", "Write the MIQCP or MISOCP model in LP format");
  exportc->add_option("--kind", kind, "miqcp or misocp")->check(CLI::IsMember({"miqcp", "misocp"}));

  auto* bounds = app.add_subcommand("bounds", "Entrywise bounds on cumulative matrices");
  auto* planes = app.add_subcommand("hyperplanes", "Affine overapproximators per wavelength");

  StackSpec stack;
  std::string order = "ascending";
  auto* heuristic = app.add_subcommand("heuristic", "Quarter-wave stack design");
  heuristic->add_option("--targets", stack.targets_nm, "Target wavelengths in nm")->required();
  heuristic->add_option("--layers-per-wavelength", stack.layers_per_wavelength, "Layers per target (1..7)");
  heuristic->add_option("--high", stack.high, "High-index material (default: config high_index)");
  heuristic->add_option("--low", stack.low, "Low-index material (default: config low_index)");
  heuristic->add_option("--order", order, "ascending or descending")->check(CLI::IsMember({"ascending", "descending"}));

  std::vector<std::string> named;
  bool with_bare = false;
  auto* compare = app.add_subcommand("compare", "Visible and broad averages of several designs");
  compare->add_option("--design", named, "name=path to a design JSON")->required();
  compare->add_flag("--bare", with_bare, "Add the uncoated substrate as a row");

  std::string y1 = "-3:3", y2 = "-2:2";
  double beta = 4.0;
  auto* points = app.add_subcommand("extreme-points", "Extreme points of a box cut by y1*y2 = beta");
  points->add_option("--y1", y1, "lo:hi");
  points->add_option("--y2", y2, "lo:hi");
  points->add_option("--beta", beta, "Curve level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*evaluate) {
    const auto c = ctx.config();
    const Design d = design_path.empty() ? Design{} : load_design(design_path);
    const auto lib = ctx.library(c, d);
    const auto g = parse_grid(grid_text);
    const auto ev = evaluate_on_grid(d, c.substrate, lib, Spectrum::uniform(arithmetic_progression(g.start, g.step, g.end)));
    std::string csv = "wavelength_nm,reflectance\n";
    for (std::size_t i = 0; i < ev.wavelengths_nm.size(); ++i)
      csv += shortest(ev.wavelengths_nm[i]) + "," + lp::number(ev.reflectance[i]) + "\n";
    ctx.write("spectrum.csv", csv);
    const double vis = evaluate_on_grid(d, c.substrate, lib, visible_grid()).average;
    const double broad = evaluate_on_grid(d, c.substrate, lib, broad_grid()).average;
    ctx.write_json("summary.json", {{"substrate", c.substrate},
                                    {"layers", d.size()},
                                    {"visible_average", vis},
                                    {"broad_average", broad},
                                    {"grid_average", ev.average}});
    std::cout << "visible " << round3(vis) << "  broad " << round3(broad) << "\n";
  } else if (*optimize) {
    const auto cat = catalog_for(ctx);
    SolveReport rep;
    if (mode == "brute") {
      rep = brute_force(cat, cap_nodes ? cap_nodes : kDefaultEnumerationCap);
    } else {
      BranchAndBoundOptions opt;
      if (cap_nodes) opt.node_cap = cap_nodes;
      opt.threads = threads;
      rep = branch_and_bound(cat, suffix_bounds(cat), opt);
    }
    ctx.write_json("report.json", report_to_json(rep));
    ctx.write_json("design.json", design_to_json(rep.design));
    std::cout << "objective " << round3(rep.objective) << (rep.proven_optimal ? " (optimal)" : " (incumbent)")
              << "  nodes " << rep.nodes_explored << "  pruned " << rep.nodes_pruned << "\n";
  } else if (*exportc) {
    const auto cat = catalog_for(ctx);
    const auto eb = tighten_bounds(cat);
    BuiltModel built;
    if (kind == "miqcp") {
      built = build_miqcp(cat, eb);
    } else {
      OverapproxLimits limits;
      limits.seed = ctx.seed;
      const auto sets = overapproximators_for(cat, eb, limits);
      for (std::size_t l = 0; l < sets.size(); ++l)
        std::cout << "wavelength " << shortest(cat.spectrum()[l].wavelength_nm) << " nm: " << sets[l].planes.size()
                  << " hyperplanes" << (sets[l].fallback ? " (fallback)" : "") << "\n";
      built = build_misocp(cat, eb, planes_of(sets));
      ctx.write_json("hyperplanes.json", hyperplanes_to_json(cat, sets));
    }
    ctx.write(kind + ".lp", write_lp(built.model));
    ctx.write_json(kind + ".variables.json", variable_map_to_json(cat, built));
    std::cout << built.model.variables().size() << " variables (" << built.model.binary_count() << " binary), "
              << built.model.linear_constraint_count() << " linear and " << built.model.quadratic_constraint_count()
              << " quadratic constraints\n";
  } else if (*bounds) {
    const auto cat = catalog_for(ctx);
    ctx.write_json("bounds.json", bounds_to_json(cat, tighten_bounds(cat)));
  } else if (*planes) {
    const auto cat = catalog_for(ctx);
    OverapproxLimits limits;
    limits.seed = ctx.seed;
    ctx.write_json("hyperplanes.json", hyperplanes_to_json(cat, overapproximators_for(cat, tighten_bounds(cat), limits)));
  } else if (*heuristic) {
    const auto c = ctx.config();
    if (stack.high.empty()) stack.high = c.high_index.value_or("");
    if (stack.low.empty()) stack.low = c.low_index.value_or("");
    if (stack.high.empty() || stack.low.empty()) throw InvalidArgument("--high and --low (or config high_index/low_index) required");
    stack.order = order == "descending" ? StackOrder::Descending : StackOrder::Ascending;
    const auto lib = ctx.library(c, {{stack.high, 0.0}, {stack.low, 0.0}});
    const auto d = quarter_wave_design(stack, lib);
    ctx.write_json("design.json", design_to_json(d));
    const auto row = compare_methods(c.substrate, lib, {{"heuristic", d}}).front();
    std::cout << d.size() << " layers  visible " << round3(row.visible) << "  broad " << round3(row.broad) << "\n";
  } else if (*compare) {
    const auto c = ctx.config();
    std::vector<NamedDesign> designs;
    if (with_bare) designs.push_back({"uncoated", {}});
    Design all;
    for (const auto& spec : named) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--design expects name=path, got '" + spec + "'");
      designs.push_back({spec.substr(0, eq), load_design(spec.substr(eq + 1))});
      all.insert(all.end(), designs.back().design.begin(), designs.back().design.end());
    }
    const auto rows = compare_methods(c.substrate, ctx.library(c, all), designs);
    ctx.write("comparison.csv", comparison_csv(rows));
    for (const auto& r : rows)
      std::cout << r.name << "  visible " << round3(r.visible) << "  broad " << round3(r.broad) << "\n";
  } else if (*points) {
    const auto ep = extreme_points_2d(parse_interval(y1), parse_interval(y2), beta);
    static constexpr const char* kinds[] = {"empty", "axes", "polytope", "cone"};
    json pts = json::array();
    for (const auto& p : ep.points) pts.push_back({p.y1, p.y2});
    json out{{"kind", kinds[static_cast<int>(ep.kind)]}, {"points", pts}};
    if (ep.tangent_point) out["tangent_point"] = {ep.tangent_point->y1, ep.tangent_point->y2};
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Usage: return 1;
      case ErrorKind::Infeasible: return 2;
      case ErrorKind::Internal: return 3;
    }
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
