#pragma once

// Independent oracles and instance generators shared by the tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "thinfilm/thinfilm.hpp"

namespace oracle {

using cplx = std::complex<double>;

struct M2 {
  cplx m[2][2];
};

inline M2 from_tilde(const thinfilm::StructuredMatrix& a) {
  const cplx i(0.0, 1.0);
  return {{{a.a11, i * a.a12}, {i * a.a21, a.a22}}};
}

inline M2 mul(const M2& a, const M2& b) {
  M2 c{};
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) c.m[r][s] = a.m[r][0] * b.m[0][s] + a.m[r][1] * b.m[1][s];
  return c;
}

inline M2 identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

/// Characteristic matrix of a dielectric layer, long double trigonometry.
inline M2 layer(double n, double thickness, double lambda) {
  const long double s = 2.0L * std::numbers::pi_v<long double> * n * thickness / lambda;
  const double c = static_cast<double>(std::cos(s));
  const double sn = static_cast<double>(std::sin(s));
  const cplx i(0.0, 1.0);
  return {{{c, i * sn / n}, {i * n * sn, c}}};
}

/// |(B - C) / (B + C)|^2 with [B; C] = M [1; eta], eta = n + ik.
inline double reflectance(const M2& m, double n, double k) {
  const cplx eta(n, k);
  const cplx B = m.m[0][0] + m.m[0][1] * eta;
  const cplx C = m.m[1][0] + m.m[1][1] * eta;
  return std::norm((B - C) / (B + C));
}

inline double fresnel(double n, double k) { return ((n - 1) * (n - 1) + k * k) / ((n + 1) * (n + 1) + k * k); }

/// Every design of `c` as option-index vectors, in mixed-radix order.
inline std::vector<std::vector<std::size_t>> all_designs(const thinfilm::Catalog& c) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (std::size_t n = 0; n < c.layer_count(); ++n) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& p : out)
      for (std::size_t o : c.layer_options(n)) {
        auto q = p;
        q.push_back(o);
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  return out;
}

/// Weighted reflectance recomputed from scratch with complex matrices.
inline double objective(const thinfilm::Catalog& c, const std::vector<std::size_t>& design) {
  double acc = 0.0;
  for (std::size_t l = 0; l < c.wavelength_count(); ++l) {
    M2 w = identity();
    for (std::size_t o : design) {
      const auto& mat = c.materials()[c.option(o).material];
      w = mul(w, layer(mat.index[l], c.option(o).thickness_nm, c.spectrum()[l].wavelength_nm));
    }
    acc += c.spectrum()[l].weight * reflectance(w, c.substrate_index(l).re, c.substrate_index(l).im);
  }
  return acc;
}

/// Cumulative tilde matrices of every prefix of a design at wavelength l.
inline std::vector<thinfilm::StructuredMatrix> prefixes(const thinfilm::Catalog& c,
                                                        const std::vector<std::size_t>& design, std::size_t l) {
  std::vector<thinfilm::StructuredMatrix> out{thinfilm::StructuredMatrix::identity()};
  for (std::size_t o : design) out.push_back(thinfilm::multiply(out.back(), c.matrix(o, l)));
  return out;
}

}  // namespace oracle

namespace gen {

struct Shape {
  std::size_t max_layers = 4;
  std::size_t max_choices = 6;
  std::size_t max_wavelengths = 3;
};

/// Random catalog with synthetic dielectrics and an absorbing substrate.
inline thinfilm::Catalog random_catalog(std::mt19937_64& rng, Shape shape = {}) {
  std::uniform_real_distribution<double> nd(1.3, 2.7), td(10.0, 300.0), ld(350.0, 1500.0), sn(0.5, 4.0), sk(0.0, 5.0);
  std::uniform_int_distribution<std::size_t> layers(1, shape.max_layers), waves(1, shape.max_wavelengths),
      mats(1, 3);
  const std::size_t N = layers(rng);
  const std::size_t L = waves(rng);
  std::vector<double> lambdas;
  while (lambdas.size() < L) {
    const double v = std::round(ld(rng));
    if (std::find(lambdas.begin(), lambdas.end(), v) == lambdas.end()) lambdas.push_back(v);
  }
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<thinfilm::ComplexIndex> sub;
  for (std::size_t l = 0; l < L; ++l) sub.push_back({sn(rng), sk(rng)});

  const std::size_t M = mats(rng);
  std::vector<thinfilm::CoatingMaterial> materials;
  for (std::size_t m = 0; m < M; ++m) {
    thinfilm::CoatingMaterial cm{"M" + std::to_string(m), {}, {}};
    for (std::size_t l = 0; l < L; ++l) cm.index.push_back(nd(rng));
    materials.push_back(std::move(cm));
  }
  // per-layer choice count stays within max_choices: split thicknesses over materials
  const std::size_t per = std::max<std::size_t>(1, shape.max_choices / M);
  std::uniform_int_distribution<std::size_t> tcount(1, per);
  for (auto& cm : materials) {
    const std::size_t T = tcount(rng);
    while (cm.thicknesses_nm.size() < T) {
      const double t = std::round(td(rng));
      if (std::find(cm.thicknesses_nm.begin(), cm.thicknesses_nm.end(), t) == cm.thicknesses_nm.end())
        cm.thicknesses_nm.push_back(t);
    }
  }
  std::vector<std::vector<std::string>> per_layer(N);
  for (auto& set : per_layer)
    for (const auto& cm : materials) set.push_back(cm.id);
  return thinfilm::Catalog(N, thinfilm::Spectrum::uniform(lambdas), "S", sub, std::move(materials),
                           std::move(per_layer));
}

inline thinfilm::StructuredMatrix random_structured(std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng)};
}

/// Random tilde matrix with determinant one: a product of random layers.
inline thinfilm::StructuredMatrix random_det1(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> nd(1.2, 3.0), td(0.0, 400.0), ld(300.0, 3000.0);
  std::uniform_int_distribution<int> count(1, 8);
  thinfilm::StructuredMatrix w = thinfilm::StructuredMatrix::identity();
  const int k = count(rng);
  const double lambda = ld(rng);
  for (int i = 0; i < k; ++i) w = w * thinfilm::make_transfer_matrix({nd(rng), 0.0}, td(rng), lambda);
  return w;
}

inline thinfilm::DispersionLibrary bundled_library() {
  return thinfilm::load_library(THINFILM_DATA_DIR, {"Mo", "Nb", "Ta", "W", "TiO2", "MgF2"});
}

/// Alternating catalog: TiO2 on odd layers, MgF2 on even.
inline thinfilm::CatalogConfig standard_config(const std::string& substrate, std::vector<double> wavelengths,
                                            std::size_t layers) {
  thinfilm::CatalogConfig c;
  c.substrate = substrate;
  c.materials = {"TiO2", "MgF2"};
  c.thicknesses["TiO2"] = thinfilm::arithmetic_progression(20, 10, 140);
  c.thicknesses["MgF2"] = thinfilm::arithmetic_progression(50, 10, 280);
  c.wavelengths = std::move(wavelengths);
  c.alternating = true;
  c.high_index = "TiO2";
  c.low_index = "MgF2";
  c.layers = layers;
  c.dispersion_dir = THINFILM_DATA_DIR;
  return c;
}

}  // namespace gen
