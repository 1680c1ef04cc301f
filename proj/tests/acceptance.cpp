// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "support.hpp"

using namespace thinfilm;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const std::vector<std::string> kSubstrates{"Mo", "Nb", "Ta", "W"};

Outcome c1_product_oracle() {
  std::mt19937_64 rng(101);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const auto a = gen::random_structured(rng), b = gen::random_structured(rng);
    const auto c = oracle::from_tilde(a * b);
    const auto o = oracle::mul(oracle::from_tilde(a), oracle::from_tilde(b));
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < 2; ++s) worst = std::max(worst, std::abs(c.m[r][s] - o.m[r][s]));
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-12 && dt < 1.0, fmt("max deviation %.2e", worst) + fmt(", %.3f s", dt)};
}

Outcome c2_determinant() {
  const auto lib = gen::bundled_library();
  auto cfg = gen::standard_config("Mo", arithmetic_progression(300, 135, 3000), 1);
  cfg.alternating = false;
  const auto cat = build_catalog(cfg, lib);
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<std::size_t> opt(0, cat.options().size() - 1), wl(0, cat.wavelength_count() - 1),
      len(1, 20);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t l = wl(rng);
    StructuredMatrix w = StructuredMatrix::identity();
    for (std::size_t k = len(rng); k > 0; --k) w = w * cat.matrix(opt(rng), l);
    worst = std::max(worst, std::abs(w.determinant() - 1.0));
  }
  return {worst <= 1e-9, fmt("max |det - 1| %.2e", worst)};
}

Outcome c3_reflectance_d() {
  std::mt19937_64 rng(103);
  const std::vector<ComplexIndex> subs{{3.7, 3.5}, {1.0, 0.0}, {0.8, 6.0}, {2.2, 1.1}};
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto w = gen::random_det1(rng);
    for (const auto& s : subs) worst = std::max(worst, std::abs(reflectance(w, s) - reflectance_from_d(w, s)));
  }
  return {worst <= 1e-10, fmt("max deviation %.2e", worst)};
}

Outcome c4_fresnel() {
  const auto lib = gen::bundled_library();
  double worst = 0.0;
  std::size_t points = 0;
  for (const auto& id : kSubstrates)
    for (const auto& r : lookup(lib, id).rows) {
      const double expected = oracle::fresnel(r.n, r.k);
      worst = std::max(worst, std::abs(reflectance(StructuredMatrix::identity(), {r.n, r.k}) - expected));
      ++points;
    }
  return {worst <= 1e-12, std::to_string(points) + " grid points, max deviation " + fmt("%.2e", worst)};
}

Outcome c5_uncoated_mo() {
  const auto t0 = Clock::now();
  const auto lib = gen::bundled_library();
  const double vis = evaluate_on_grid({}, "Mo", lib, visible_grid()).average;
  const double broad = evaluate_on_grid({}, "Mo", lib, broad_grid()).average;
  const double dt = seconds_since(t0);
  return {std::abs(vis - 0.570) <= 0.02 && std::abs(broad - 0.826) <= 0.02 && dt < 1.0,
          fmt("visible %.4f (0.570)", vis) + fmt(", broad %.4f (0.826)", broad) + fmt(", %.3f s", dt)};
}

Outcome c6_bound_soundness() {
  std::mt19937_64 rng(106);
  const auto t0 = Clock::now();
  std::size_t checked = 0;
  bool ok = true;
  for (int t = 0; t < 20; ++t) {
    const auto cat = gen::random_catalog(rng, {4, 6, 3});
    const auto b = tighten_bounds(cat);
    for (const auto& d : oracle::all_designs(cat))
      for (std::size_t l = 0; l < cat.wavelength_count(); ++l) {
        const auto p = oracle::prefixes(cat, d, l);
        for (std::size_t n = 0; n < p.size(); ++n) {
          ok = ok && b.at(l, n).contains(p[n], 1e-9);
          ++checked;
        }
      }
  }
  const double dt = seconds_since(t0);
  return {ok && dt < 10.0, std::to_string(checked) + " prefix products" + fmt(", %.2f s", dt)};
}

Outcome c7_overapproximators() {
  std::mt19937_64 rng(107);
  const auto t0 = Clock::now();
  double worst_k = 1e300, worst_w = 1e300;
  std::size_t planes = 0;
  for (int t = 0; t < 10; ++t) {
    const auto cat = gen::random_catalog(rng, {4, 5, 2});
    const auto b = tighten_bounds(cat);
    const auto sets = overapproximators_for(cat, b);
    const auto designs = oracle::all_designs(cat);
    for (std::size_t l = 0; l < cat.wavelength_count(); ++l) {
      const auto s = cat.substrate_index(l);
      for (const auto& h : sets[l].planes) {
        ++planes;
        for (const auto& p : sets[l].candidates) worst_k = std::min(worst_k, h(p) - denominator_d(to_matrix(p), s));
        for (const auto& d : designs) {
          const auto w = oracle::prefixes(cat, d, l).back();
          worst_w = std::min(worst_w, h(w) - denominator_d(w, s));
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  return {worst_k >= -1e-9 && worst_w >= -1e-6 && dt < 60.0,
          std::to_string(planes) + " hyperplanes, min slack on K " + fmt("%.2e", worst_k) + ", on designs " +
              fmt("%.2e", worst_w) + fmt(", %.2f s", dt)};
}

Outcome c8_geometry() {
  const auto poly = extreme_points_2d({-3, 3}, {-2, 2}, 4.0);
  bool ok = poly.kind == HullKind::Polytope && poly.points.size() == 4;
  for (Point2 p : {Point2{2, 2}, Point2{3, 4.0 / 3}, Point2{-2, -2}, Point2{-3, -4.0 / 3}}) {
    bool found = false;
    for (const auto& q : poly.points) found = found || (q.y1 == p.y1 && q.y2 == p.y2);
    ok = ok && found;
  }
  const auto cone = extreme_points_2d({1, 3}, {4.0 / 3, 4}, 4.0);
  ok = ok && cone.kind == HullKind::Cone && cone.tangent_point &&
       std::abs(cone.tangent_point->y1 - std::sqrt(3.0)) <= 1e-3 &&
       std::abs(cone.tangent_point->y2 - 4.0 / std::sqrt(3.0)) <= 1e-3;
  auto near = [&](Point2 p) {
    for (const auto& q : cone.points)
      if (std::abs(q.y1 - p.y1) <= 1e-3 && std::abs(q.y2 - p.y2) <= 1e-3) return true;
    return false;
  };
  ok = ok && near({1.0, 3.285}) && near({2.465, 4.0 / 3});
  std::string pts;
  for (const auto& q : cone.points) pts += fmt(" (%.3f", q.y1) + fmt(", %.3f)", q.y2);
  return {ok, "cone points" + pts};
}

Outcome c9_solver_equivalence() {
  std::mt19937_64 rng(109);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto cat = gen::random_catalog(rng);
    worst = std::max(worst, std::abs(brute_force(cat).objective - branch_and_bound(cat, suffix_bounds(cat)).objective));
  }
  const auto lib = gen::bundled_library();
  std::uint64_t nodes = 0, tree = 0;
  for (const auto& s : kSubstrates) {
    const auto cat = build_catalog(gen::standard_config(s, {410}, 6), lib);
    const auto bb = branch_and_bound(cat, suffix_bounds(cat));
    worst = std::max(worst, std::abs(brute_force(cat).objective - bb.objective));
    nodes += bb.nodes_explored;
    tree += enumeration_tree_size(cat);
  }
  return {worst <= 1e-10, fmt("max |bnb - brute| %.2e", worst) + ", N=6 instances: bnb nodes " +
                              std::to_string(nodes) + " vs " + std::to_string(tree) + " enumerated"};
}

Outcome c10_single_wavelength_tables() {
  const auto lib = gen::bundled_library();
  // published optima at 370, 410, 770 nm
  const std::map<std::string, std::array<double, 3>> published{
      {"Mo", {0.995, 0.996, 0.992}}, {"Nb", {0.996, 0.996, 0.994}}, {"Ta", {0.995, 0.996, 0.995}},
      {"W", {0.996, 0.996, 0.990}}};
  const std::array<double, 3> lambdas{370, 410, 770};
  bool ok = true;
  std::string detail;
  double worst_gap = 1e9;
  for (const auto& s : kSubstrates)
    for (std::size_t i = 0; i < 3; ++i) {
      const auto cat = build_catalog(gen::standard_config(s, {lambdas[i]}, 6), lib);
      const double v = brute_force(cat).objective;
      const double target = published.at(s)[i];
      ok = ok && v >= target - 0.01;
      worst_gap = std::min(worst_gap, v - (target - 0.01));
      detail += " " + s + "@" + fmt("%.0f", lambdas[i]) + "=" + fmt("%.4f", v) + "/" + fmt("%.3f", target);
    }
  return {ok, "optimum/reference:" + detail + fmt("; min margin %.4f", worst_gap)};
}

Outcome c11_miqcp_exactness() {
  std::mt19937_64 rng(111);
  double worst_obj = 0.0;
  std::size_t infeasible = 0, designs = 0, misocp_bad = 0;
  for (int t = 0; t < 5; ++t) {
    const auto cat = gen::random_catalog(rng, {3, 5, 2});
    const auto eb = tighten_bounds(cat);
    const auto built = build_miqcp(cat, eb);
    for (const auto& d : oracle::all_designs(cat)) {
      const auto val = assignment_for_design(built, cat, d);
      infeasible += !violations(built.model, val, 1e-9).empty();
      worst_obj = std::max(worst_obj, std::abs(objective_value(built.model, val) - oracle::objective(cat, d)));
      ++designs;
    }
    const auto relaxed = build_misocp(cat, eb, planes_of(overapproximators_for(cat, eb)));
    const auto best = brute_force(cat);
    misocp_bad += !violations(relaxed.model, assignment_for_design(relaxed, cat, best.options), 1e-6).empty();
  }
  return {infeasible == 0 && misocp_bad == 0 && worst_obj <= 1e-8,
          std::to_string(designs) + " designs, " + std::to_string(infeasible) + " infeasible, max objective error " +
              fmt("%.2e", worst_obj) + ", MISOCP optimum violations " + std::to_string(misocp_bad)};
}

Outcome c12_round_trip() {
  const auto lib = gen::bundled_library();
  const auto cat = build_catalog(gen::standard_config("Mo", {410, 550, 770}, 6), lib);
  const auto eb = tighten_bounds(cat);
  bool ok = true;
  std::string detail;
  for (const auto& built : {build_miqcp(cat, eb), build_misocp(cat, eb, planes_of(overapproximators_for(cat, eb)))}) {
    const auto text = write_lp(built.model);
    const auto back = parse_lp(text);
    const bool eq = structurally_equal(built.model, back, 1e-15);
    const bool same = write_lp(back) == text;
    ok = ok && eq && same && back.variables().size() == built.model.variables().size() &&
         back.constraints().size() == built.model.constraints().size();
    detail += " " + std::to_string(back.variables().size()) + " vars/" + std::to_string(back.constraints().size()) +
              " rows " + (eq && same ? "ok" : "MISMATCH") + ";";
  }
  return {ok, detail};
}

Outcome c13_heuristic() {
  const auto lib = gen::bundled_library();
  StackSpec spec{{450, 500, 750, 900, 1000, 1200, 1500, 2000, 2200}, 2, "TiO2", "MgF2", StackOrder::Ascending};
  const double asc = evaluate_on_grid(quarter_wave_design(spec, lib), "W", lib, broad_grid()).average;
  spec.order = StackOrder::Descending;
  const double desc = evaluate_on_grid(quarter_wave_design(spec, lib), "W", lib, broad_grid()).average;
  const bool ambiguous = std::abs(asc - desc) > 0.03;
  const bool ok = ambiguous ? (std::abs(asc - 0.924) <= 0.03 || std::abs(desc - 0.924) <= 0.03)
                            : std::abs(asc - 0.924) <= 0.03;
  return {ok, fmt("ascending %.4f", asc) + fmt(", descending %.4f (reference 0.924)", desc) +
                  (ambiguous ? ", order-sensitive" : ", default order asserted")};
}

Outcome c14_large_models_exported() {
  // large instances are exported for external solvers, not solved here
  const auto lib = gen::bundled_library();
  auto cfg = gen::standard_config("W", arithmetic_progression(380, 39, 770), 14);
  cfg.thicknesses["TiO2"] = arithmetic_progression(20, 20, 300);
  cfg.thicknesses["MgF2"] = arithmetic_progression(50, 20, 550);
  const auto cat = build_catalog(cfg, lib);
  bool too_large = false;
  try {
    brute_force(cat);
  } catch (const InstanceTooLarge&) {
    too_large = true;
  }
  const auto eb = tighten_bounds(cat);
  const auto built = build_misocp(cat, eb, planes_of(overapproximators_for(cat, eb)));
  const auto back = parse_lp(write_lp(built.model));
  const bool ok = too_large && structurally_equal(back, built.model, 1e-15);
  return {ok, "declared out of internal-solve scope; N=14 visible MISOCP exported with " +
                  std::to_string(back.binary_count()) + " binaries, " + std::to_string(back.constraints().size()) +
                  " rows, re-parsed equal"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"structured product matches complex oracle", c1_product_oracle},
      {"determinant of catalog products stays one", c2_determinant},
      {"reflectance equals 1 - 4n/D for unit determinant", c3_reflectance_d},
      {"uncoated reflectance equals Fresnel formula", c4_fresnel},
      {"uncoated molybdenum window averages", c5_uncoated_mo},
      {"entry bounds contain all prefix products", c6_bound_soundness},
      {"overapproximators dominate D", c7_overapproximators},
      {"extreme-point geometry of the worked examples", c8_geometry},
      {"branch and bound equals brute force", c9_solver_equivalence},
      {"single-wavelength N=6 optima vs published values", c10_single_wavelength_tables},
      {"MIQCP encoding exact on every design", c11_miqcp_exactness},
      {"LP export round trip", c12_round_trip},
      {"quarter-wave 9x2 on tungsten, broad window", c13_heuristic},
      {"large instances exported, not solved internally", c14_large_models_exported},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %2zu: %s -- %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
