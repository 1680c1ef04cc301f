#pragma once

// Entrywise bounds on cumulative transfer matrices by corner propagation.
//
// For a fixed multiplier T the entries of B*T (and T*B) are linear in the
// entries of B, so over a box of B their extremes sit at box corners. Pushing
// the 16 corners of each layer's box through every admissible matrix gives a
// sound box for the next layer.

#include <algorithm>
#include <array>
#include <span>
#include <vector>

#include "thinfilm/materials.hpp"
#include "thinfilm/optics.hpp"

namespace thinfilm {

/// Closed box of structured matrices, entrywise lower <= upper.
struct EntryBox {
  StructuredMatrix lower;
  StructuredMatrix upper;

  static EntryBox point(const StructuredMatrix& m) { return {m, m}; }

  bool contains(const StructuredMatrix& m, double tol = 0.0) const {
    return m.a11 >= lower.a11 - tol && m.a11 <= upper.a11 + tol && m.a12 >= lower.a12 - tol &&
           m.a12 <= upper.a12 + tol && m.a21 >= lower.a21 - tol && m.a21 <= upper.a21 + tol &&
           m.a22 >= lower.a22 - tol && m.a22 <= upper.a22 + tol;
  }

  bool consistent() const {
    return lower.a11 <= upper.a11 && lower.a12 <= upper.a12 && lower.a21 <= upper.a21 &&
           lower.a22 <= upper.a22;
  }

  /// All 16 entrywise lower/upper combinations.
  std::array<StructuredMatrix, 16> corners() const {
    std::array<StructuredMatrix, 16> out;
    for (unsigned mask = 0; mask < 16; ++mask)
      out[mask] = {(mask & 1) ? upper.a11 : lower.a11, (mask & 2) ? upper.a12 : lower.a12,
                   (mask & 4) ? upper.a21 : lower.a21, (mask & 8) ? upper.a22 : lower.a22};
    return out;
  }
};

namespace detail {

struct BoxAccumulator {
  StructuredMatrix lo{+1e300, +1e300, +1e300, +1e300};
  StructuredMatrix hi{-1e300, -1e300, -1e300, -1e300};

  void add(const StructuredMatrix& m) {
    lo = {std::min(lo.a11, m.a11), std::min(lo.a12, m.a12), std::min(lo.a21, m.a21), std::min(lo.a22, m.a22)};
    hi = {std::max(hi.a11, m.a11), std::max(hi.a12, m.a12), std::max(hi.a21, m.a21), std::max(hi.a22, m.a22)};
  }
  EntryBox box() const { return {lo, hi}; }
};

}  // namespace detail

/// Boxes indexed by (wavelength position, stage 0..N).
class EntryBounds {
 public:
  EntryBounds() = default;
  EntryBounds(std::size_t wavelengths, std::size_t layers)
      : wavelengths_(wavelengths), layers_(layers), boxes_(wavelengths * (layers + 1)) {}

  std::size_t wavelength_count() const { return wavelengths_; }
  std::size_t layer_count() const { return layers_; }
  EntryBox& at(std::size_t l, std::size_t stage) { return boxes_[l * (layers_ + 1) + stage]; }
  const EntryBox& at(std::size_t l, std::size_t stage) const { return boxes_[l * (layers_ + 1) + stage]; }

 private:
  std::size_t wavelengths_ = 0;
  std::size_t layers_ = 0;
  std::vector<EntryBox> boxes_;
};

/// Forward pass: at(l, n) bounds the prefix product of layers 1..n (stage 0 is I).
inline EntryBounds tighten_bounds(const Catalog& catalog) {
  const std::size_t N = catalog.layer_count();
  EntryBounds bounds(catalog.wavelength_count(), N);
  for (std::size_t l = 0; l < catalog.wavelength_count(); ++l) {
    bounds.at(l, 0) = EntryBox::point(StructuredMatrix::identity());
    std::vector<StructuredMatrix> generators{StructuredMatrix::identity()};
    for (std::size_t n = 1; n <= N; ++n) {
      detail::BoxAccumulator acc;
      for (const auto& b : generators)
        for (std::size_t o : catalog.layer_options(n - 1)) acc.add(multiply(b, catalog.matrix(o, l)));
      bounds.at(l, n) = acc.box();
      const auto c = bounds.at(l, n).corners();
      generators.assign(c.begin(), c.end());
    }
  }
  return bounds;
}

/// Backward pass: at(l, n) bounds the product of layers n+1..N (stage N is I).
inline EntryBounds suffix_bounds(const Catalog& catalog) {
  const std::size_t N = catalog.layer_count();
  EntryBounds bounds(catalog.wavelength_count(), N);
  for (std::size_t l = 0; l < catalog.wavelength_count(); ++l) {
    bounds.at(l, N) = EntryBox::point(StructuredMatrix::identity());
    std::vector<StructuredMatrix> generators{StructuredMatrix::identity()};
    for (std::size_t n = N; n-- > 0;) {
      detail::BoxAccumulator acc;
      for (const auto& b : generators)
        for (std::size_t o : catalog.layer_options(n)) acc.add(multiply(catalog.matrix(o, l), b));
      bounds.at(l, n) = acc.box();
      const auto c = bounds.at(l, n).corners();
      generators.assign(c.begin(), c.end());
    }
  }
  return bounds;
}

/// Exact entrywise range of prefix * S over S in `suffix`.
inline EntryBox interval_product_box(const StructuredMatrix& p, const EntryBox& suffix) {
  // c * [lo, hi]
  auto scaled = [](double c, double lo, double hi) -> std::pair<double, double> {
    return c >= 0.0 ? std::pair{c * lo, c * hi} : std::pair{c * hi, c * lo};
  };
  auto sum = [](std::pair<double, double> a, std::pair<double, double> b) {
    return std::pair{a.first + b.first, a.second + b.second};
  };
  const auto& s = suffix.lower;
  const auto& S = suffix.upper;
  const auto e11 = sum(scaled(p.a11, s.a11, S.a11), scaled(-p.a12, s.a21, S.a21));
  const auto e12 = sum(scaled(p.a11, s.a12, S.a12), scaled(p.a12, s.a22, S.a22));
  const auto e21 = sum(scaled(p.a21, s.a11, S.a11), scaled(p.a22, s.a21, S.a21));
  const auto e22 = sum(scaled(p.a22, s.a22, S.a22), scaled(-p.a21, s.a12, S.a12));
  return {{e11.first, e12.first, e21.first, e22.first}, {e11.second, e12.second, e21.second, e22.second}};
}

/// Maximum of the convex quadratic D over a box (attained at a corner).
inline double max_denominator_over_box(const EntryBox& box, ComplexIndex substrate) {
  double best = 0.0;
  for (const auto& c : box.corners()) best = std::max(best, denominator_d(c, substrate));
  return best;
}

/// Upper bound on the weighted reflectance of every completion of `prefix`
/// whose remaining-layer product lies in `suffix`.
inline double upper_bound_objective(std::span<const StructuredMatrix> prefix,
                                    std::span<const EntryBox> suffix,
                                    std::span<const ComplexIndex> substrate, const Spectrum& spectrum) {
  if (prefix.size() != spectrum.size() || suffix.size() != spectrum.size() ||
      substrate.size() != spectrum.size())
    throw MismatchedSpectrumLength("upper bound inputs");
  double acc = 0.0;
  for (std::size_t l = 0; l < spectrum.size(); ++l) {
    const double dmax = max_denominator_over_box(interval_product_box(prefix[l], suffix[l]), substrate[l]);
    acc += spectrum[l].weight * (1.0 - 4.0 * substrate[l].re / dmax);
  }
  return acc;
}

}  // namespace thinfilm
