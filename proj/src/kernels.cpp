#include "swelab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "swelab/errors.hpp"
#include "swelab/params.hpp"
#include "swelab/quad.hpp"
#include "swelab/spectral_series.hpp"

namespace swelab::kernels {
namespace {

// Below this value of xi*(t+s) the overlap integral is evaluated from its
// Taylor series; the closed form loses all digits as xi -> 0.
constexpr double kSmallArgument = 1e-3;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw PreconditionError(std::string(name) + " must be finite");
}

void require_time(double t, const char* name) {
  require_finite(t, name);
  if (t < 0.0) throw PreconditionError(std::string(name) + " must be >= 0");
}

// (x - sin x), accurate for small x.
double x_minus_sin(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))));
  }
  return x - std::sin(x);
}

// 1 - cos x without cancellation.
double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

// overlap(t, s, xi) / xi^2, bounded as xi -> 0.
double overlap_over_xi2(double t, double s, double xi) {
  if (xi * (t + s) < kSmallArgument) {
    const double d = t - s;
    const double m2 = 0.5 * d * s * s + s * s * s / 3.0;
    const double m4 = 0.5 * d * d * d * s * s + d * d * s * s * s + d * s * s * s * s + 0.4 * s * s * s * s * s;
    return m2 - xi * xi * m4 / 6.0;
  }
  return time_overlap_integral(t, s, xi) / (xi * xi);
}

// Head-plus-tail evaluation of int_0^inf xi^(1-2H) head(xi) dxi where the
// integrand equals `tail` (a spectral series) pointwise for xi >= a.
double spectral_integral(const quad::Integrand& head, const SpectralSeries& tail, double H, double a,
                         const KernelConfig& cfg, const char* what) {
  const double alpha = 1.0 - 2.0 * H;
  double value = 0.0;
  double err = 0.0;
  double magnitude = 0.0;
  bool converged = true;

  if (cfg.damping_eps > 0.0) {
    const double eps = cfg.damping_eps;
    auto damped_head = [&](double xi) { return head(xi) * std::exp(-eps * xi * xi); };
    quad::Tolerance tol{cfg.abs_tol, cfg.rel_tol};
    quad::QuadResult h = quad::integrate_singular(damped_head, alpha, a, tol);
    value += h.value;
    err += h.err_est;
    magnitude += std::abs(h.value);
    converged = converged && h.converged;
    double omega_max = 0.0;
    for (const auto& term : tail.terms()) omega_max = std::max(omega_max, term.omega);
    const double panel = omega_max > 0.0 ? std::numbers::pi / omega_max : 1.0;
    const double upper = a + std::sqrt(40.0 / eps);
    auto damped_tail = [&](double xi) { return tail(xi) * std::exp(-eps * xi * xi); };
    for (double lo = a; lo < upper; lo += panel) {
      quad::QuadResult r = quad::integrate_adaptive(damped_tail, lo, std::min(lo + panel, upper), tol);
      value += r.value;
      err += r.err_est;
      magnitude += std::abs(r.value);
      converged = converged && r.converged;
    }
  } else {
    SpectralSeries::TailResult t = tail.integrate_tail(a, cfg.rel_tol, cfg.abs_tol, cfg.max_periods);
    quad::Tolerance head_tol{std::max(cfg.abs_tol, cfg.rel_tol * t.magnitude), cfg.rel_tol};
    quad::QuadResult h = quad::integrate_singular(head, alpha, a, head_tol);
    value = h.value + t.result.value;
    err = h.err_est + t.result.err_est;
    magnitude = std::abs(h.value) + t.magnitude;
    converged = h.converged && t.result.converged;
  }

  const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::max(std::abs(value), magnitude));
  if (!converged && err > target) {
    throw ConvergenceError(std::string(what) + ": spectral quadrature did not reach tolerance", value, err);
  }
  return value;
}

double head_limit(double t) { return std::max(1.0, 1.0 / t); }

// 2 C_H [ (t/2) xi^(-1-2H) - (1/4) xi^(-2-2H) sin(2 t xi) ]: the variance
// integrand on the half line.
SpectralSeries variance_series(double t, double H, double c) {
  return SpectralSeries{{c * t / 2.0, 1.0 + 2.0 * H, 0.0, Trig::kCos},
                        {-c / 4.0, 2.0 + 2.0 * H, 2.0 * t, Trig::kSin}};
}

SpectralSeries one_minus_cos_series(double a) {
  return SpectralSeries{{1.0, 0.0, 0.0, Trig::kCos}, {-1.0, 0.0, a, Trig::kCos}};
}

}  // namespace

void KernelConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw PreconditionError("kernel tolerances must be positive");
  if (!(damping_eps >= 0.0) || !std::isfinite(damping_eps)) {
    throw PreconditionError("damping_eps must be a finite value >= 0");
  }
}

double spectral_constant(double H) {
  return std::tgamma(2.0 * H + 1.0) * std::sin(std::numbers::pi * H) / (2.0 * std::numbers::pi);
}

double time_overlap_integral(double t, double s, double xi) {
  if (!std::isfinite(t) || !std::isfinite(s) || !std::isfinite(xi)) {
    throw PreconditionError("time_overlap_integral: non-finite input");
  }
  if (s < 0.0) throw PreconditionError("time_overlap_integral: requires s >= 0");
  if (s > t) throw PreconditionError("time_overlap_integral: requires s <= t");
  if (!(xi > 0.0)) throw PreconditionError("time_overlap_integral: requires xi > 0");
  if (xi * (t + s) < kSmallArgument) return xi * xi * overlap_over_xi2(t, s, xi);
  // Rewritten with x = s xi so that no two large terms cancel:
  //   [cos(d xi) (2x - sin 2x)/2 + sin(d xi) sin^2 x] / (2 xi),  d = t - s.
  const double d = t - s;
  const double x = s * xi;
  const double sx = std::sin(x);
  return (0.5 * std::cos(d * xi) * x_minus_sin(2.0 * x) + std::sin(d * xi) * sx * sx) / (2.0 * xi);
}

double variance(double t, double H, const KernelConfig& cfg) {
  require_time(t, "t");
  require_spatial_hurst(H);
  cfg.validate();
  if (t == 0.0) return 0.0;
  const double c = 2.0 * spectral_constant(H);
  auto head = [&](double xi) { return c * overlap_over_xi2(t, t, xi); };
  return spectral_integral(head, variance_series(t, H, c), H, head_limit(t), cfg, "variance");
}

double cov(SpaceTimePoint p, SpaceTimePoint q, double H, const KernelConfig& cfg) {
  require_time(p.t, "p.t");
  require_time(q.t, "q.t");
  require_finite(p.x, "p.x");
  require_finite(q.x, "q.x");
  require_spatial_hurst(H);
  cfg.validate();
  const double t = std::max(p.t, q.t);
  const double s = std::min(p.t, q.t);
  const double dist = std::abs(p.x - q.x);
  if (s == 0.0) return 0.0;
  const double c = 2.0 * spectral_constant(H);
  const double d = t - s;
  auto head = [&](double xi) { return c * overlap_over_xi2(t, s, xi) * std::cos(dist * xi); };
  const double p1 = 1.0 + 2.0 * H;
  const double p2 = 2.0 + 2.0 * H;
  SpectralSeries tail{{c * s / 4.0, p1, d + dist, Trig::kCos},
                      {c * s / 4.0, p1, d - dist, Trig::kCos},
                      {c / 8.0, p2, d + dist, Trig::kSin},
                      {c / 8.0, p2, d - dist, Trig::kSin},
                      {-c / 8.0, p2, t + s + dist, Trig::kSin},
                      {-c / 8.0, p2, t + s - dist, Trig::kSin}};
  tail.simplify();
  return spectral_integral(head, tail, H, head_limit(t), cfg, "cov");
}

MetricEvaluation d1_detailed(SpaceTimePoint p, SpaceTimePoint q, double H, const KernelConfig& cfg) {
  if (p.t == q.t && p.x == q.x) {
    require_time(p.t, "p.t");
    require_finite(p.x, "p.x");
    return {0.0, 0.0, false};
  }
  const double radicand = variance(p.t, H, cfg) + variance(q.t, H, cfg) - 2.0 * cov(p, q, H, cfg);
  return {std::sqrt(std::max(radicand, 0.0)), radicand, radicand < -1e3 * cfg.abs_tol};
}

double d1(SpaceTimePoint p, SpaceTimePoint q, double H, const KernelConfig& cfg) {
  return d1_detailed(p, q, H, cfg).value;
}

double d2_sq(double t, double h, double x, double y, double H, const KernelConfig& cfg) {
  require_finite(t, "t");
  if (!(t > 0.0)) throw PreconditionError("d2_sq requires t > 0");
  require_finite(h, "h");
  require_finite(x, "x");
  require_finite(y, "y");
  require_spatial_hurst(H);
  cfg.validate();
  const double dist = std::abs(x - y);
  const double shift = std::abs(h);
  if (dist == 0.0 || shift == 0.0) return 0.0;
  const double c = 8.0 * spectral_constant(H);
  auto head = [&](double xi) {
    return c * overlap_over_xi2(t, t, xi) * one_minus_cos(dist * xi) * one_minus_cos(shift * xi);
  };
  const SpectralSeries tail = variance_series(t, H, c) * one_minus_cos_series(dist) * one_minus_cos_series(shift);
  return spectral_integral(head, tail, H, head_limit(t), cfg, "d2_sq");
}

double temporal_increment_weight(double t, double tau, double xi) {
  const double half = std::sin(0.5 * tau * xi);
  const double f1 = t * 2.0 * half * half;
  const double f2 = x_minus_sin(tau * xi) / (2.0 * xi);
  const double f3 = half * half * std::sin((2.0 * t + tau) * xi) / xi;
  return f1 + f2 + f3;
}

double d3_sq(double t, double tau, double x, double y, double H, const KernelConfig& cfg) {
  require_finite(t, "t");
  require_finite(tau, "tau");
  require_finite(x, "x");
  require_finite(y, "y");
  if (!(t > 0.0)) throw PreconditionError("d3_sq requires t > 0");
  if (!(tau > 0.0)) throw PreconditionError("d3_sq requires tau > 0");
  require_spatial_hurst(H);
  cfg.validate();
  const double dist = std::abs(x - y);
  if (dist == 0.0) return 0.0;
  const double c = 4.0 * spectral_constant(H);
  auto head = [&](double xi) {
    const double w = one_minus_cos(dist * xi) / (xi * xi);
    // Near xi = 0 every factor of f1 + f2 + f3 is O(xi) or smaller; the
    // product with the O(1) ratio w stays bounded.
    return c * w * temporal_increment_weight(t, tau, xi);
  };
  const double p1 = 1.0 + 2.0 * H;
  const double p2 = 2.0 + 2.0 * H;
  // f1 + f2 + f3 times xi^(-1-2H), expanded into sinusoids.
  SpectralSeries bracket{{t + 0.5 * tau, p1, 0.0, Trig::kCos},
                         {-t, p1, tau, Trig::kCos},
                         {-0.5, p2, tau, Trig::kSin},
                         {0.5, p2, 2.0 * t + tau, Trig::kSin},
                         {-0.25, p2, 2.0 * t + 2.0 * tau, Trig::kSin},
                         {-0.25, p2, 2.0 * t, Trig::kSin}};
  bracket.simplify();
  const SpectralSeries tail = bracket * one_minus_cos_series(dist) * c;
  return spectral_integral(head, tail, H, head_limit(t + tau), cfg, "d3_sq");
}

}  // namespace swelab::kernels
