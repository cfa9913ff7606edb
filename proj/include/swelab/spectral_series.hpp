#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "swelab/quad.hpp"

namespace swelab::kernels {

enum class Trig { kCos, kSin };

/// One term coef * xi^(-power) * trig(omega * xi), omega >= 0.
struct SpectralTerm {
  double coef;
  double power;
  double omega;
  Trig kind;
};

/// Finite sum of power-law-weighted sinusoids in the frequency variable.
///
/// Every large-frequency tail of the covariance integrands is such a sum,
/// which lets each tail be integrated term by term with a single
/// oscillation period and an exact power envelope.
class SpectralSeries {
 public:
  SpectralSeries() = default;
  SpectralSeries(std::initializer_list<SpectralTerm> terms);

  /// Appends a term after normalizing it (omega >= 0, sin(0) dropped).
  void add(SpectralTerm term);

  /// Product with trig product-to-sum expansion; like terms are merged.
  [[nodiscard]] SpectralSeries operator*(const SpectralSeries& other) const;
  [[nodiscard]] SpectralSeries operator*(double factor) const;
  [[nodiscard]] SpectralSeries operator+(const SpectralSeries& other) const;

  [[nodiscard]] double operator()(double xi) const;
  [[nodiscard]] const std::vector<SpectralTerm>& terms() const noexcept { return terms_; }

  /// Merges terms whose power, kind and frequency coincide, drops zeros.
  void simplify();

  /// Integral over [a, inf). Each term is integrated with
  /// quad::integrate_osc_tail; returns the summed result together with the
  /// a-priori magnitude sum_k |coef_k| a^(1-p_k)/(p_k-1) in `magnitude`.
  struct TailResult {
    quad::QuadResult result;
    double magnitude;
  };
  [[nodiscard]] TailResult integrate_tail(double a, double rel_tol, double abs_tol,
                                          std::size_t max_periods) const;

 private:
  std::vector<SpectralTerm> terms_;
};

}  // namespace swelab::kernels
