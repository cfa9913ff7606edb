#pragma once

#include <cstddef>

namespace swelab::kernels {

/// A space-time location of the one-dimensional field, t >= 0.
struct SpaceTimePoint {
  double t = 0.0;
  double x = 0.0;
};

struct KernelConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  /// Whole oscillation periods integrated explicitly per tail term before
  /// the remainder is folded.
  std::size_t max_periods = 2;
  /// Mollification: integrands are multiplied by exp(-damping_eps * xi^2).
  double damping_eps = 0.0;

  void validate() const;
};

/// C_H = Gamma(2H+1) sin(pi H) / (2 pi), the spectral density constant of
/// fractional noise with Hurst parameter H.
double spectral_constant(double H);

/// int_0^s sin((t-r) xi) sin((s-r) xi) dr for 0 <= s <= t, xi > 0.
double time_overlap_integral(double t, double s, double xi);

/// Var u(t, x) = C_H int_R [t/2 - sin(2t|xi|)/(4|xi|)] |xi|^(-1-2H) dxi.
double variance(double t, double H, const KernelConfig& cfg = {});

/// Cov(u(p), u(q)) as a single spectral integral.
double cov(SpaceTimePoint p, SpaceTimePoint q, double H, const KernelConfig& cfg = {});

struct MetricEvaluation {
  double value;     ///< sqrt of the clamped radicand
  double radicand;  ///< variance(p) + variance(q) - 2 cov(p, q) before clamping
  bool roundoff_flag;  ///< radicand below -1e3 * abs_tol: not explainable by round-off
};

/// L2 distance between u(p) and u(q), with the radicand diagnostics.
MetricEvaluation d1_detailed(SpaceTimePoint p, SpaceTimePoint q, double H, const KernelConfig& cfg = {});
double d1(SpaceTimePoint p, SpaceTimePoint q, double H, const KernelConfig& cfg = {});

/// E|D_h u(t,x) - D_h u(t,y)|^2 with D_h u(t,x) = u(t,x+h) - u(t,x).
double d2_sq(double t, double h, double x, double y, double H, const KernelConfig& cfg = {});

/// E|D_tau u(t,x) - D_tau u(t,y)|^2 with D_tau u(t,x) = u(t+tau,x) - u(t,x).
double d3_sq(double t, double tau, double x, double y, double H, const KernelConfig& cfg = {});

/// The bracket f1 + f2 + f3 of the temporal-increment metric at frequency
/// xi; equals int |Fourier transform of the increment kernel|^2 dr >= 0.
double temporal_increment_weight(double t, double tau, double xi);

}  // namespace swelab::kernels
