#pragma once

// Exact search over discrete designs, and design evaluation.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "thinfilm/bounds.hpp"
#include "thinfilm/design.hpp"
#include "thinfilm/materials.hpp"

namespace thinfilm {

struct Evaluation {
  std::vector<double> wavelengths_nm;
  std::vector<double> reflectance;
  double average = 0.0;
};

/// Reflectance of an admissible design at the catalog's own wavelengths.
inline Evaluation evaluate_options(const Catalog& catalog, const std::vector<std::size_t>& options) {
  Evaluation ev;
  ev.wavelengths_nm = catalog.spectrum().wavelengths();
  std::vector<StructuredMatrix> cumulative;
  for (std::size_t l = 0; l < catalog.wavelength_count(); ++l) {
    StructuredMatrix w = StructuredMatrix::identity();
    for (std::size_t o : options) w = multiply(w, catalog.matrix(o, l));
    cumulative.push_back(w);
    ev.reflectance.push_back(reflectance(w, catalog.substrate_index(l)));
  }
  ev.average = average_reflectance(cumulative, catalog.substrate_indices(), catalog.spectrum());
  return ev;
}

inline Evaluation evaluate_design(const Design& design, const Catalog& catalog) {
  return evaluate_options(catalog, options_of_design(catalog, design));
}

/// Reflectance on an arbitrary grid with matrices computed afresh from
/// dispersion data (coating extinction ignored). Thicknesses need not lie on
/// any catalog grid, and an empty design gives the bare substrate.
inline Evaluation evaluate_on_grid(const Design& design, std::string_view substrate,
                                   const DispersionLibrary& library, const Spectrum& grid) {
  Evaluation ev;
  const auto& sub = lookup(library, substrate);
  std::vector<StructuredMatrix> cumulative;
  std::vector<ComplexIndex> subs;
  for (const auto& s : grid) {
    const double lambda = s.wavelength_nm;
    if (!sub.covers(lambda))
      throw SpectrumCoverage(sub.material_id + " does not cover " + std::to_string(lambda) + " nm");
    StructuredMatrix w = StructuredMatrix::identity();
    for (const auto& layer : design) {
      const auto& table = lookup(library, layer.material);
      if (!table.covers(lambda))
        throw SpectrumCoverage(table.material_id + " does not cover " + std::to_string(lambda) + " nm");
      w = multiply(w, make_transfer_matrix({index_at(table, lambda).re, 0.0}, layer.thickness_nm, lambda));
    }
    const auto si = index_at(sub, lambda);
    cumulative.push_back(w);
    subs.push_back(si);
    ev.wavelengths_nm.push_back(lambda);
    ev.reflectance.push_back(reflectance(w, si));
  }
  ev.average = average_reflectance(cumulative, subs, grid);
  return ev;
}

struct SolveReport {
  std::string method;
  std::vector<std::size_t> options;
  Design design;
  double objective = -std::numeric_limits<double>::infinity();
  std::uint64_t nodes_explored = 0;
  std::uint64_t nodes_pruned = 0;
  std::uint64_t leaves = 0;
  double wall_seconds = 0.0;
  bool proven_optimal = false;
  std::vector<double> incumbent_trace;
  std::uint64_t bound_violations = 0;  // child bound above parent bound
};

namespace detail {

// Better value, or equal value with a lexicographically smaller option sequence.
inline bool improves(double value, const std::vector<std::size_t>& design, double best,
                     const std::vector<std::size_t>& best_design) {
  if (value > best) return true;
  return value == best && (best_design.empty() || design < best_design);
}

inline double weighted_reflectance(const Catalog& c, const std::vector<StructuredMatrix>& w) {
  double acc = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) acc += c.spectrum()[l].weight * reflectance(w[l], c.substrate_index(l));
  return acc;
}

inline std::uint64_t tree_size(const Catalog& c) {
  std::uint64_t total = 1, level = 1;
  for (std::size_t n = 0; n < c.layer_count(); ++n) {
    level *= c.layer_options(n).size();
    total += level;
  }
  return total;
}

}  // namespace detail

inline constexpr std::size_t kDefaultEnumerationCap = 100'000'000;

/// Exhaustive depth-first enumeration sharing prefix products. The
/// lexicographically smallest optimal design (by option order) is returned.
inline SolveReport brute_force(const Catalog& catalog, std::size_t cap = kDefaultEnumerationCap) {
  const auto t0 = std::chrono::steady_clock::now();
  if (catalog.design_count() > cap)
    throw InstanceTooLarge(std::to_string(catalog.design_count()) + " designs exceed the enumeration cap of " +
                           std::to_string(cap));
  const std::size_t N = catalog.layer_count();
  const std::size_t L = catalog.wavelength_count();
  SolveReport rep;
  rep.method = "brute";
  std::vector<std::vector<StructuredMatrix>> prefix(N + 1, std::vector<StructuredMatrix>(L, StructuredMatrix::identity()));
  std::vector<std::size_t> current(N);

  auto visit = [&](auto&& self, std::size_t n) -> void {
    ++rep.nodes_explored;
    if (n == N) {
      ++rep.leaves;
      const double value = detail::weighted_reflectance(catalog, prefix[N]);
      if (value > rep.objective) {
        rep.objective = value;
        rep.options = current;
        rep.incumbent_trace.push_back(value);
      }
      return;
    }
    for (std::size_t o : catalog.layer_options(n)) {
      current[n] = o;
      for (std::size_t l = 0; l < L; ++l) prefix[n + 1][l] = multiply(prefix[n][l], catalog.matrix(o, l));
      self(self, n + 1);
    }
  };
  visit(visit, 0);
  rep.design = design_from_options(catalog, rep.options);
  rep.proven_optimal = true;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

struct BranchAndBoundOptions {
  std::optional<std::uint64_t> node_cap;
  unsigned threads = 1;
  double tolerance = 1e-12;
};

/// Depth-first branch and bound. A child is discarded when its bound is
/// below the incumbent by more than the tolerance, so every design tying the
/// optimum survives and the tie-break matches brute_force.
inline SolveReport branch_and_bound(const Catalog& catalog, const EntryBounds& suffix,
                                    const BranchAndBoundOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t N = catalog.layer_count();
  const std::size_t L = catalog.wavelength_count();
  if (suffix.layer_count() != N || suffix.wavelength_count() != L)
    throw InvalidArgument("suffix bounds do not match the catalog");

  SolveReport rep;
  rep.method = "bnb";
  std::atomic<double> incumbent{-std::numeric_limits<double>::infinity()};
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> capped{false};
  std::mutex merge;

  auto bound_of = [&](const std::vector<StructuredMatrix>& prefix, std::size_t stage) {
    std::vector<EntryBox> boxes;
    boxes.reserve(L);
    for (std::size_t l = 0; l < L; ++l) boxes.push_back(suffix.at(l, stage));
    return upper_bound_objective(prefix, boxes, catalog.substrate_indices(), catalog.spectrum());
  };

  struct Worker {
    std::vector<std::size_t> best;
    double best_value = -std::numeric_limits<double>::infinity();
    std::uint64_t explored = 0, pruned = 0, leaves = 0, violations = 0;
  };

  auto search = [&](Worker& wk, std::vector<std::size_t>& current, std::vector<std::vector<StructuredMatrix>>& prefix,
                    std::size_t n, double parent_bound, auto&& self) -> void {
    if (opt.node_cap && nodes.fetch_add(1) >= *opt.node_cap) {
      capped = true;
      return;
    }
    ++wk.explored;
    if (n == N) {
      ++wk.leaves;
      const double value = detail::weighted_reflectance(catalog, prefix[N]);
      if (detail::improves(value, current, wk.best_value, wk.best)) {
        wk.best_value = value;
        wk.best = current;
      }
      double seen = incumbent.load();
      while (value > seen && !incumbent.compare_exchange_weak(seen, value)) {
      }
      if (value > seen) {
        std::lock_guard lock(merge);
        if (rep.incumbent_trace.empty() || value > rep.incumbent_trace.back()) rep.incumbent_trace.push_back(value);
      }
      return;
    }
    struct Child {
      std::size_t option;
      double bound;
      std::vector<StructuredMatrix> prefix;
    };
    std::vector<Child> children;
    for (std::size_t o : catalog.layer_options(n)) {
      Child c{o, 0.0, std::vector<StructuredMatrix>(L)};
      for (std::size_t l = 0; l < L; ++l) c.prefix[l] = multiply(prefix[n][l], catalog.matrix(o, l));
      c.bound = bound_of(c.prefix, n + 1);
      if (c.bound > parent_bound + 1e-9) ++wk.violations;
      children.push_back(std::move(c));
    }
    std::stable_sort(children.begin(), children.end(), [](const Child& a, const Child& b) { return a.bound > b.bound; });
    for (auto& c : children) {
      if (capped) return;
      if (c.bound < incumbent.load() - opt.tolerance) {
        ++wk.pruned;
        continue;
      }
      current[n] = c.option;
      prefix[n + 1] = std::move(c.prefix);
      self(wk, current, prefix, n + 1, c.bound, self);
    }
  };

  const std::vector<StructuredMatrix> root(L, StructuredMatrix::identity());
  const double root_bound = bound_of(root, 0);
  std::vector<Worker> workers;

  if (opt.threads <= 1 || N == 0) {
    Worker wk;
    std::vector<std::size_t> current(N);
    std::vector<std::vector<StructuredMatrix>> prefix(N + 1, root);
    search(wk, current, prefix, 0, root_bound, search);
    workers.push_back(std::move(wk));
  } else {
    // root children are the units of work
    ++rep.nodes_explored;
    const auto opts = catalog.layer_options(0);
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t o : opts) {
      std::vector<StructuredMatrix> p(L);
      for (std::size_t l = 0; l < L; ++l) p[l] = catalog.matrix(o, l);
      order.emplace_back(bound_of(p, 1), o);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::atomic<std::size_t> next{0};
    workers.resize(opt.threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < opt.threads; ++t) {
      pool.emplace_back([&, t] {
        auto& wk = workers[t];
        std::vector<std::size_t> current(N);
        std::vector<std::vector<StructuredMatrix>> prefix(N + 1, root);
        for (std::size_t i; (i = next.fetch_add(1)) < order.size();) {
          if (capped) break;
          const auto [bound, o] = order[i];
          if (bound < incumbent.load() - opt.tolerance) {
            ++wk.pruned;
            continue;
          }
          current[0] = o;
          for (std::size_t l = 0; l < L; ++l) prefix[1][l] = catalog.matrix(o, l);
          search(wk, current, prefix, 1, bound, search);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const auto& wk : workers) {
    rep.nodes_explored += wk.explored;
    rep.nodes_pruned += wk.pruned;
    rep.leaves += wk.leaves;
    rep.bound_violations += wk.violations;
    if (!wk.best.empty() && detail::improves(wk.best_value, wk.best, rep.objective, rep.options)) {
      rep.objective = wk.best_value;
      rep.options = wk.best;
    }
  }
  if (N == 0) rep.options.clear();
  rep.design = design_from_options(catalog, rep.options);
  rep.proven_optimal = !capped;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Nodes a full enumeration visits, root included.
inline std::uint64_t enumeration_tree_size(const Catalog& catalog) { return detail::tree_size(catalog); }

}  // namespace thinfilm
