#pragma once

#include <cstddef>
#include <functional>

namespace swelab::quad {

using Integrand = std::function<double(double)>;

struct Tolerance {
  double abs = 1e-13;
  double rel = 1e-10;

  /// Error budget for an integral whose value is `value`.
  [[nodiscard]] double target(double value) const;
};

struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;     ///< absolute error estimate, always >= 0
  std::size_t evals = 0;    ///< integrand evaluations spent
  bool converged = false;   ///< err_est <= max(abs, rel * |value|)

  QuadResult& operator+=(const QuadResult& other);
};

/// Globally adaptive Gauss-Kronrod (7/15) bisection on [a, b].
///
/// Always returns the best estimate; `converged` reports whether the
/// tolerance was met before `max_panels` subintervals were in use.
QuadResult integrate_adaptive(const Integrand& f, double a, double b, Tolerance tol,
                              std::size_t max_panels = 4000);

/// Integral of s^alpha * f(s) over [0, b] for alpha > -1.
///
/// For alpha < 0 the endpoint singularity is removed by s = u^(1/(1+alpha)),
/// which turns the weight into a constant; for alpha >= 0 the product is
/// bounded and is integrated directly. Throws DomainError for alpha <= -1.
QuadResult integrate_singular(const Integrand& f, double alpha, double b, Tolerance tol,
                              std::size_t max_panels = 4000);

/// Integral of x^(-beta) * osc(x) over [a, inf) with a > 0.
///
/// `osc` is expected to be bounded and `period`-periodic. Up to
/// `max_periods` whole periods are integrated explicitly; the remainder is
/// folded onto a single period with Hurwitz zeta weights,
///   int_X^inf x^-beta osc(x) dx = int_0^P osc(X+v) P^-beta zeta(beta, (X+v)/P) dv,
/// which is exact for periodic `osc`. Throws DivergenceError for beta <= 1.
QuadResult integrate_osc_tail(double beta, const Integrand& osc, double period, double a,
                              Tolerance tol, std::size_t max_periods = 2);

/// Hurwitz zeta function sum_{k>=0} (q+k)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

}  // namespace swelab::quad
