#pragma once

// Affine overapproximators of D over {x in box : x1*x2 + x3*x4 = 1}.
//
// Coordinates follow x = (x1, x2, x3, x4) = (w11, w22, w12, w21) on the tilde
// entries of the cumulative matrix. Since D is convex, an affine function
// that dominates it on a finite point set dominates it on the convex hull of
// that set; the point set is built from the 2-D slices of the bilinear
// surface with one coordinate pair pinned at a box corner.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "thinfilm/bounds.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/optics.hpp"

namespace thinfilm {

struct Interval {
  double lo;
  double hi;

  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

struct Point2 {
  double y1;
  double y2;
};

enum class HullKind {
  Empty,     // the curve misses the box
  Axes,      // beta == 0: the curve is the pair of coordinate axes
  Polytope,  // both branches cross the box; finitely many extreme points
  Cone,      // one branch only; hull outer-approximated by a quadrilateral
};

struct ExtremePoints2D {
  HullKind kind = HullKind::Empty;
  std::vector<Point2> points;
  std::optional<Point2> tangent_point;  // Cone case only
};

inline constexpr double kZeroBeta = 1e-12;

namespace detail {

inline double edge_tol(double v) { return 1e-12 * (1.0 + std::abs(v)); }

inline void push_unique(std::vector<Point2>& pts, Point2 p) {
  for (const auto& q : pts)
    if (std::abs(q.y1 - p.y1) <= 1e-12 * (1.0 + std::abs(p.y1)) &&
        std::abs(q.y2 - p.y2) <= 1e-12 * (1.0 + std::abs(p.y2)))
      return;
  pts.push_back(p);
}

// Range [a, b] of y1 over which the positive branch of y1*y2 = beta (beta > 0)
// lies inside the box, or nullopt when it misses.
inline std::optional<Interval> positive_arc(Interval y1, Interval y2, double beta) {
  if (y1.hi <= 0.0 || y2.hi <= 0.0) return std::nullopt;
  const double lo1 = std::max(y1.lo, 0.0);
  const double lo2 = std::max(y2.lo, 0.0);
  const double a = std::max(lo1, beta / y2.hi);
  const double b = lo2 > 0.0 ? std::min(y1.hi, beta / lo2) : y1.hi;
  if (a > b + edge_tol(b)) return std::nullopt;
  return Interval{std::min(a, b), b};
}

// beta > 0, exactly one branch present and already reflected into y1, y2 > 0.
inline ExtremePoints2D cone_points(Interval arc, double beta) {
  ExtremePoints2D out;
  out.kind = HullKind::Cone;
  const double a = arc.lo;
  const double b = arc.hi;
  if (b - a <= edge_tol(b)) {
    out.points.push_back({a, beta / a});
    return out;
  }
  // tangent at the geometric mean of the arc's y1 range
  const double t = std::sqrt(a * b);
  const double intercept = 2.0 * beta / t;
  const double slope = -beta / (t * t);
  out.tangent_point = Point2{t, beta / t};
  out.points.push_back({a, beta / a});
  out.points.push_back({b, beta / b});
  out.points.push_back({a, intercept + slope * a});
  out.points.push_back({(beta / b - intercept) / slope, beta / b});
  return out;
}

}  // namespace detail

/// Extreme points of (an outer approximation of) the convex hull of
/// {(y1, y2) in box : y1*y2 = beta}.
inline ExtremePoints2D extreme_points_2d(Interval y1, Interval y2, double beta) {
  ExtremePoints2D out;
  if (std::abs(beta) <= kZeroBeta) {
    out.kind = HullKind::Axes;
    if (y2.contains(0.0)) {
      detail::push_unique(out.points, {y1.lo, 0.0});
      detail::push_unique(out.points, {y1.hi, 0.0});
    }
    if (y1.contains(0.0)) {
      detail::push_unique(out.points, {0.0, y2.lo});
      detail::push_unique(out.points, {0.0, y2.hi});
    }
    if (out.points.empty()) out.kind = HullKind::Empty;
    return out;
  }
  if (beta < 0.0) {
    // reflect y2 so the curve has positive beta, then reflect the answer back
    auto r = extreme_points_2d(y1, {-y2.hi, -y2.lo}, -beta);
    for (auto& p : r.points) p.y2 = -p.y2;
    if (r.tangent_point) r.tangent_point->y2 = -r.tangent_point->y2;
    return r;
  }

  const auto pos = detail::positive_arc(y1, y2, beta);
  const auto neg = detail::positive_arc({-y1.hi, -y1.lo}, {-y2.hi, -y2.lo}, beta);
  if (pos && neg) {
    out.kind = HullKind::Polytope;
    const std::array<Point2, 4> cand{Point2{y1.lo, beta / y1.lo}, Point2{y1.hi, beta / y1.hi},
                                     Point2{beta / y2.lo, y2.lo}, Point2{beta / y2.hi, y2.hi}};
    for (const auto& p : cand) {
      if (!std::isfinite(p.y1) || !std::isfinite(p.y2)) continue;
      if (y1.contains(p.y1, detail::edge_tol(p.y1)) && y2.contains(p.y2, detail::edge_tol(p.y2)))
        detail::push_unique(out.points, {std::clamp(p.y1, y1.lo, y1.hi), std::clamp(p.y2, y2.lo, y2.hi)});
    }
    return out;
  }
  if (pos) return detail::cone_points(*pos, beta);
  if (neg) {
    auto r = detail::cone_points(*neg, beta);
    for (auto& p : r.points) p = {-p.y1, -p.y2};
    if (r.tangent_point) r.tangent_point = Point2{-r.tangent_point->y1, -r.tangent_point->y2};
    return r;
  }
  return out;
}

using Point4 = std::array<double, 4>;

/// Bounds on (x1, x2, x3, x4) = (w11, w22, w12, w21).
struct Box4 {
  std::array<Interval, 4> x;

  static Box4 from_entries(const EntryBox& b) {
    return {{Interval{b.lower.a11, b.upper.a11}, Interval{b.lower.a22, b.upper.a22},
             Interval{b.lower.a12, b.upper.a12}, Interval{b.lower.a21, b.upper.a21}}};
  }

  bool contains(const Point4& p, double tol) const {
    for (std::size_t i = 0; i < 4; ++i)
      if (!x[i].contains(p[i], tol)) return false;
    return true;
  }
};

inline Point4 to_point(const StructuredMatrix& w) { return {w.a11, w.a22, w.a12, w.a21}; }
inline StructuredMatrix to_matrix(const Point4& p) { return {p[0], p[2], p[3], p[1]}; }

using CandidateSet = std::vector<Point4>;

/// Candidate extreme points K of the unit-determinant slice of `box`.
inline CandidateSet collect_candidates(const Box4& box) {
  CandidateSet k;
  auto add = [&](const Point4& p) {
    for (const auto& q : k) {
      bool same = true;
      for (std::size_t i = 0; i < 4; ++i) same = same && std::abs(p[i] - q[i]) <= 1e-9;
      if (same) return;
    }
    k.push_back(p);
  };
  const auto& b = box.x;
  for (double x1 : {b[0].lo, b[0].hi})
    for (double x2 : {b[1].lo, b[1].hi})
      for (const auto& p : extreme_points_2d(b[2], b[3], 1.0 - x1 * x2).points) add({x1, x2, p.y1, p.y2});
  for (double x3 : {b[2].lo, b[2].hi})
    for (double x4 : {b[3].lo, b[3].hi})
      for (const auto& p : extreme_points_2d(b[0], b[1], 1.0 - x3 * x4).points) add({p.y1, p.y2, x3, x4});
  if (k.empty()) throw EmptyCandidateSet("no point of the box satisfies x1*x2 + x3*x4 = 1");
  return k;
}

/// alpha0 + alpha1*x1 + ... + alpha4*x4.
struct Hyperplane {
  std::array<double, 5> alpha{};

  double operator()(const Point4& x) const {
    return alpha[0] + alpha[1] * x[0] + alpha[2] * x[1] + alpha[3] * x[2] + alpha[4] * x[3];
  }
  double operator()(const StructuredMatrix& w) const { return (*this)(to_point(w)); }
};

using ScalarField = std::function<double(const Point4&)>;

/// Affine interpolant of g through five points.
inline Hyperplane fit_hyperplane(std::span<const Point4, 5> points, const ScalarField& g) {
  std::array<std::array<double, 6>, 5> a{};
  for (std::size_t r = 0; r < 5; ++r) {
    a[r] = {1.0, points[r][0], points[r][1], points[r][2], points[r][3], g(points[r])};
  }
  const auto original = a;
  double scale = 0.0;
  for (const auto& row : a)
    for (std::size_t c = 0; c < 5; ++c) scale = std::max(scale, std::abs(row[c]));

  for (std::size_t col = 0; col < 5; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 5; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) <= 1e-10 * scale) throw SingularSystem("interpolation points are affinely dependent");
    std::swap(a[piv], a[col]);
    for (std::size_t r = col + 1; r < 5; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < 6; ++c) a[r][c] -= f * a[col][c];
    }
  }
  Hyperplane h;
  for (std::size_t r = 5; r-- > 0;) {
    double s = a[r][5];
    for (std::size_t c = r + 1; c < 5; ++c) s -= a[r][c] * h.alpha[c];
    h.alpha[r] = s / a[r][r];
  }
  for (const auto& row : original) {
    const Point4 p{row[1], row[2], row[3], row[4]};
    if (std::abs(h(p) - row[5]) > 1e-8 * std::max(1.0, std::abs(row[5])))
      throw SingularSystem("interpolation residual too large");
  }
  return h;
}

struct OverapproxLimits {
  std::size_t exhaustive_max = 12;   // enumerate all 5-subsets up to this |K|
  std::size_t random_subsets = 5000; // sampled subsets beyond it
  std::size_t extremal_points = 12;  // largest-g points whose subsets are all tried
  std::uint64_t seed = 42;
  double filter_tol = 1e-9;
  double lift = 1e-9;
};

struct Overapproximation {
  std::vector<Hyperplane> planes;
  CandidateSet candidates;
  std::size_t subsets_tried = 0;
  bool fallback = false;
};

/// Constant plane at the maximum of D over the box corners.
inline Hyperplane fallback_hyperplane(const Box4& box, ComplexIndex substrate) {
  double best = 0.0;
  for (unsigned mask = 0; mask < 16; ++mask) {
    Point4 c;
    for (std::size_t i = 0; i < 4; ++i) c[i] = (mask >> i & 1U) ? box.x[i].hi : box.x[i].lo;
    best = std::max(best, denominator_d(to_matrix(c), substrate));
  }
  Hyperplane h;
  h.alpha[0] = best;
  return h;
}

namespace detail {

inline bool same_plane(const Hyperplane& a, const Hyperplane& b) {
  for (std::size_t i = 0; i < 5; ++i)
    if (std::abs(a.alpha[i] - b.alpha[i]) > 1e-7 * std::max({1.0, std::abs(a.alpha[i]), std::abs(b.alpha[i])}))
      return false;
  return true;
}

template <class Visit>
void for_each_5_subset(std::size_t n, Visit&& visit) {
  if (n < 5) return;
  std::array<std::size_t, 5> idx{0, 1, 2, 3, 4};
  while (true) {
    visit(idx);
    int i = 4;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - 5 + static_cast<std::size_t>(i)) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (auto j = static_cast<std::size_t>(i) + 1; j < 5; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Affine overapproximators of D on the unit-determinant slice of `box`.
/// `stream` separates the random subset streams of different wavelengths.
/// Throws NoValidHyperplane when no fitted plane dominates D on K.
inline Overapproximation generate_overapproximators(const Box4& box, ComplexIndex substrate,
                                                    std::uint64_t stream,
                                                    const OverapproxLimits& limits = {}) {
  Overapproximation out;
  out.candidates = collect_candidates(box);
  const auto& k = out.candidates;
  const ScalarField g = [&](const Point4& p) { return denominator_d(to_matrix(p), substrate); };
  std::vector<double> gk;
  for (const auto& p : k) gk.push_back(g(p));

  auto try_subset = [&](const std::array<std::size_t, 5>& idx) {
    ++out.subsets_tried;
    const std::array<Point4, 5> pts{k[idx[0]], k[idx[1]], k[idx[2]], k[idx[3]], k[idx[4]]};
    Hyperplane h;
    try {
      h = fit_hyperplane(pts, g);
    } catch (const SingularSystem&) {
      return;
    }
    for (std::size_t i = 0; i < k.size(); ++i)
      if (h(k[i]) < gk[i] - limits.filter_tol) return;
    h.alpha[0] += limits.lift;
    for (const auto& q : out.planes)
      if (detail::same_plane(q, h)) return;
    out.planes.push_back(h);
  };

  if (k.size() <= limits.exhaustive_max) {
    detail::for_each_5_subset(k.size(), try_subset);
  } else {
    std::mt19937_64 rng(limits.seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    std::vector<std::size_t> perm(k.size());
    for (std::size_t s = 0; s < limits.random_subsets; ++s) {
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      std::array<std::size_t, 5> idx{};
      for (std::size_t j = 0; j < 5; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, perm.size() - 1);
        std::swap(perm[j], perm[pick(rng)]);
        idx[j] = perm[j];
      }
      std::sort(idx.begin(), idx.end());
      try_subset(idx);
    }
    std::vector<std::size_t> order(k.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gk[a] > gk[b]; });
    order.resize(std::min(order.size(), limits.extremal_points));
    detail::for_each_5_subset(order.size(), [&](const std::array<std::size_t, 5>& sub) {
      std::array<std::size_t, 5> idx{order[sub[0]], order[sub[1]], order[sub[2]], order[sub[3]], order[sub[4]]};
      std::sort(idx.begin(), idx.end());
      try_subset(idx);
    });
  }
  if (out.planes.empty()) throw NoValidHyperplane("no fitted plane dominates D on the candidate set");
  return out;
}

/// As generate_overapproximators, but falls back to the constant corner bound.
inline Overapproximation overapproximators_or_fallback(const Box4& box, ComplexIndex substrate,
                                                       std::uint64_t stream,
                                                       const OverapproxLimits& limits = {}) {
  try {
    return generate_overapproximators(box, substrate, stream, limits);
  } catch (const NoValidHyperplane&) {
    Overapproximation out;
    out.candidates = collect_candidates(box);
    out.planes.push_back(fallback_hyperplane(box, substrate));
    out.fallback = true;
    return out;
  }
}

}  // namespace thinfilm
