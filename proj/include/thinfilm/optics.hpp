#pragma once

// Normal-incidence transfer-matrix optics in the real "tilde" carrier.
//
// A dielectric layer's 2x2 transfer matrix has a real diagonal and a purely
// imaginary off-diagonal, and products of such matrices keep that shape.
// StructuredMatrix stores the four real numbers (a11, a12, a21, a22) standing
// for the complex matrix [[a11, i*a12], [i*a21, a22]].

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

/// Complex refractive index n + i*k with k >= 0 (absorbing media have k > 0).
struct ComplexIndex {
  double re = 1.0;
  double im = 0.0;

  friend bool operator==(const ComplexIndex&, const ComplexIndex&) = default;
};

struct StructuredMatrix {
  double a11 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 1.0;

  static constexpr StructuredMatrix identity() { return {1.0, 0.0, 0.0, 1.0}; }

  /// Determinant of the represented complex matrix.
  constexpr double determinant() const { return a11 * a22 + a12 * a21; }

  friend bool operator==(const StructuredMatrix&, const StructuredMatrix&) = default;
};

/// Complex matrix product expressed on the tilde entries.
constexpr StructuredMatrix multiply(const StructuredMatrix& a, const StructuredMatrix& b) {
  return {a.a11 * b.a11 - a.a12 * b.a21,
          a.a11 * b.a12 + a.a12 * b.a22,
          a.a21 * b.a11 + a.a22 * b.a21,
          a.a22 * b.a22 - a.a21 * b.a12};
}

constexpr StructuredMatrix operator*(const StructuredMatrix& a, const StructuredMatrix& b) {
  return multiply(a, b);
}

/// Left-to-right product; the empty chain is the identity.
inline StructuredMatrix chain_product(std::span<const StructuredMatrix> layers) {
  StructuredMatrix acc = StructuredMatrix::identity();
  for (const auto& m : layers) acc = multiply(acc, m);
  return acc;
}

/// Transfer matrix of a dielectric layer of physical thickness `thickness_nm`.
inline StructuredMatrix make_transfer_matrix(ComplexIndex index, double thickness_nm,
                                             double wavelength_nm) {
  if (index.im != 0.0) throw NonDielectricIndex("coating index must be real");
  if (!(wavelength_nm > 0.0)) throw NonPositiveWavelength("wavelength must be > 0");
  if (!(thickness_nm >= 0.0)) throw InvalidArgument("thickness must be >= 0");
  if (!(index.re > 0.0)) throw InvalidArgument("refractive index must be > 0");
  const double phase = 2.0 * std::numbers::pi * index.re * thickness_nm / wavelength_nm;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  return {c, s / index.re, index.re * s, c};
}

inline constexpr double kDegenerateDenominator = 1e-12;

/// Reflectance of a substrate coated with a stack whose cumulative matrix is `w`.
inline double reflectance(const StructuredMatrix& w, ComplexIndex substrate) {
  const double n = substrate.re;
  const double k = substrate.im;
  const double x1 = w.a11, x2 = w.a22, x3 = w.a12, x4 = w.a21;
  const double re_lo = x1 - k * x3;
  const double im_lo = x4 + k * x2;
  const double num = (re_lo - n * x2) * (re_lo - n * x2) + (im_lo - n * x3) * (im_lo - n * x3);
  const double den = (re_lo + n * x2) * (re_lo + n * x2) + (im_lo + n * x3) * (im_lo + n * x3);
  if (!(den > kDegenerateDenominator)) throw DegenerateDenominator("reflectance denominator vanished");
  return num / den;
}

/// The convex quadratic D with reflectance(w) = 1 - 4 Re(a) / D(w) whenever det(w) = 1.
constexpr double denominator_d(const StructuredMatrix& w, ComplexIndex substrate) {
  const double n = substrate.re;
  const double k = substrate.im;
  const double t1 = w.a11 - k * w.a12;
  const double t2 = n * w.a12;
  const double t3 = w.a21 + k * w.a22;
  const double t4 = n * w.a22;
  return t1 * t1 + t2 * t2 + t3 * t3 + t4 * t4 + 2.0 * n;
}

/// Reflectance computed through D; only meaningful for unit-determinant `w`.
inline double reflectance_from_d(const StructuredMatrix& w, ComplexIndex substrate) {
  return 1.0 - 4.0 * substrate.re / denominator_d(w, substrate);
}

/// Wavelength grid with nonnegative weights summing to one.
class Spectrum {
 public:
  struct Sample {
    double wavelength_nm;
    double weight;
  };

  Spectrum() = default;

  explicit Spectrum(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw ValidationError("spectrum is empty");
    double total = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!(samples_[i].wavelength_nm > 0.0)) throw NonPositiveWavelength("spectrum wavelength");
      if (i > 0 && !(samples_[i].wavelength_nm > samples_[i - 1].wavelength_nm))
        throw ValidationError("spectrum wavelengths must be strictly increasing");
      if (!(samples_[i].weight >= 0.0)) throw ValidationError("spectrum weights must be >= 0");
      total += samples_[i].weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("spectrum weights must sum to 1");
  }

  static Spectrum uniform(std::span<const double> wavelengths_nm) {
    std::vector<Sample> s;
    s.reserve(wavelengths_nm.size());
    const double w = wavelengths_nm.empty() ? 0.0 : 1.0 / static_cast<double>(wavelengths_nm.size());
    for (double l : wavelengths_nm) s.push_back({l, w});
    return Spectrum(std::move(s));
  }

  static Spectrum weighted(std::span<const double> wavelengths_nm, std::span<const double> weights) {
    if (wavelengths_nm.size() != weights.size())
      throw MismatchedSpectrumLength("wavelength and weight lists differ in length");
    std::vector<Sample> s;
    for (std::size_t i = 0; i < weights.size(); ++i) s.push_back({wavelengths_nm[i], weights[i]});
    return Spectrum(std::move(s));
  }

  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  std::vector<double> wavelengths() const {
    std::vector<double> out;
    for (const auto& s : samples_) out.push_back(s.wavelength_nm);
    return out;
  }

 private:
  std::vector<Sample> samples_;
};

/// Weighted mean reflectance; `cumulative[l]` and `substrate[l]` belong to spectrum sample l.
inline double average_reflectance(std::span<const StructuredMatrix> cumulative,
                                  std::span<const ComplexIndex> substrate,
                                  const Spectrum& spectrum) {
  if (cumulative.size() != spectrum.size() || substrate.size() != spectrum.size())
    throw MismatchedSpectrumLength("one cumulative matrix and substrate index per wavelength");
  double acc = 0.0;
  for (std::size_t l = 0; l < spectrum.size(); ++l)
    acc += spectrum[l].weight * reflectance(cumulative[l], substrate[l]);
  return acc;
}

}  // namespace thinfilm
