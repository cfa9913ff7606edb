#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "swelab/params.hpp"
#include "swelab/regression.hpp"

namespace swelab::solvability {

enum class Regime { kTimeWhite, kSmoothTime, kIntermediate };

std::string to_string(Regime r);

struct SolvabilityVerdict {
  bool solvable;
  double margin;  ///< signed distance to the critical manifold; solvable iff > 0
  Regime regime;
};

/// Closed-form existence criterion:
///   H0 = 1/2:      |H| > d - 1
///   H0 = 1:        |H| > d - 2
///   1/2 < H0 < 1:  |H| + H0 > d - 1/2
SolvabilityVerdict condition_closed_form(const HurstParams& params);

/// Radial spectral integrand whose integrability at infinity decides
/// solvability (angular constant set to 1).
double radial_integrand(double rho, const HurstParams& params, double t = 1.0);

/// g1(rho) = int_0^rho (rho - s) cos(s) s^(2 h0 - 2) ds.
double g1(double rho, double h0);
/// g2(rho) = int_0^rho [sin(2 rho - s) - sin(s)] s^(2 h0 - 2) ds.
double g2(double rho, double h0);
/// g = g1/2 - g2/4, the double integral of sin(s) sin(r) |r-s|^(2 h0 - 2)
/// over the triangle 0 < s < r < rho.
double g(double rho, double h0);

struct GValues {
  double rho;
  double g1;
  double g2;
  double g;
};

/// Running evaluation of g1, g2, g along a nondecreasing sequence of radii.
///
/// Keeps the three moments
///   C(rho) = int s^a cos s,  S(rho) = int s^a sin s,  S1(rho) = int s^(a+1) cos s
/// over [0, rho] (a = 2 h0 - 2) and extends them segment by segment, so a
/// curve of n points costs O(total length) instead of O(n * length):
///   g1 = rho C - S1,   g2 = sin(2 rho) C - cos(2 rho) S - S.
class GMomentSweep {
 public:
  explicit GMomentSweep(double h0);

  /// Throws PreconditionError if rho is below the previous radius.
  GValues advance_to(double rho);

 private:
  double alpha_;
  double pos_ = 0.0;
  double c_ = 0.0;
  double s_ = 0.0;
  double s1_ = 0.0;
};

/// g values on an arbitrary nondecreasing grid via GMomentSweep.
std::vector<GValues> g_curve(double h0, const std::vector<double>& rho_grid);

struct Hyp1F2Params {
  double a1;
  double b1;
  double b2;
  double z;
};

/// Power series of 1F2(a1; b1, b2; z) with compensated summation, valid for
/// |z| <= z_max; beyond that throws RegimeError.
double hyp1f2(const Hyp1F2Params& p, double z_max = 900.0);

/// (2 h0 - 1) / rho * int_0^1 sin(rho s) s^(2 h0 - 3) ds, which equals
/// 1F2(h0 - 1/2; 3/2, h0 + 1/2; -rho^2/4).
double sine_moment(double rho, double h0);

using stats::fit_line;
using stats::LinearFit;

/// Linear fit of g1 against rho on a uniform grid of n_points in [rho_lo, rho_hi].
LinearFit g1_asymptotic_slope(double h0, double rho_lo, double rho_hi, std::size_t n_points);

enum class NumericVerdict { kConvergent, kDivergent, kIndeterminate };

std::string to_string(NumericVerdict v);

struct TailFit {
  std::vector<double> lambda_grid;
  std::vector<double> partial_integrals;  ///< M(Lambda) = int_1^Lambda radial_integrand
  double fitted_exponent;  ///< log-log slope of M(2 Lambda) - M(Lambda); < 0 means integrable
  bool classified_convergent;
  double r_squared;
  NumericVerdict verdict;
  std::size_t negative_samples;  ///< integrand nodes below zero (expected 0)
};

/// Band around the critical increment slope 0 treated as undecidable.
inline constexpr double kSlopeBand = 0.02;

/// Numerical tail-exponent classification. Cutoffs are whole multiples of
/// the oscillation period 2 pi / t, doubling up to at most lambda_max.
TailFit classify_numeric(const HurstParams& params, double t = 1.0, double lambda_max = 1024.0,
                         std::size_t n_cutoffs = 6);

struct PhaseRow {
  double h0;
  double habs;
  SolvabilityVerdict closed;
  NumericVerdict numeric;
  double fitted_exponent;
  bool near_critical;  ///< |margin| < exclusion band: agreement not required
  [[nodiscard]] bool agrees() const;
  [[nodiscard]] std::string flag() const;
};

struct PhaseScanConfig {
  double t = 1.0;
  double lambda_max = 1024.0;
  std::size_t n_cutoffs = 6;
  double exclusion_band = 0.05;
};

/// Cross product of h0_grid x habs_grid in row-major (h0 outer) order.
/// Points outside the parameter domain (|H|/d not in (0, 1)) are skipped.
std::vector<PhaseRow> phase_diagram_scan(std::size_t d, const std::vector<double>& h0_grid,
                                         const std::vector<double>& habs_grid,
                                         const PhaseScanConfig& cfg = {});

}  // namespace swelab::solvability
