#include "swelab/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "swelab/errors.hpp"

namespace swelab::quad {
namespace {

// Kronrod abscissae (positive half, descending) and weights; the Gauss
// 7-point rule uses the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a;
  double b;
  double value;
  double err;
};

struct ByError {
  bool operator()(const Panel& l, const Panel& r) const {
    if (l.err != r.err) return l.err < r.err;
    return l.a > r.a;  // deterministic tie-break
  }
};

Panel gk15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return {a, b, resk * half, err};
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw PreconditionError(std::string(what) + " must be finite");
}

}  // namespace

double Tolerance::target(double value) const { return std::max(abs, rel * std::abs(value)); }

QuadResult& QuadResult::operator+=(const QuadResult& other) {
  value += other.value;
  err_est += other.err_est;
  evals += other.evals;
  converged = converged && other.converged;
  return *this;
}

QuadResult integrate_adaptive(const Integrand& f, double a, double b, Tolerance tol,
                              std::size_t max_panels) {
  check_finite(a, "lower limit");
  check_finite(b, "upper limit");
  if (!(a < b)) {
    if (a == b) return {0.0, 0.0, 1, true};
    throw PreconditionError("integrate_adaptive requires a < b");
  }
  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  Panel first = gk15(f, a, b);
  std::size_t evals = 15;
  double value = first.value;
  double err = first.err;
  heap.push(first);
  std::size_t panels = 1;
  std::size_t since_resum = 0;
  while (err > tol.target(value) && panels < max_panels) {
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at machine precision
    heap.pop();
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    evals += 30;
    value += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++panels;
    if (++since_resum == 64) {
      // Re-accumulate to keep the running sums free of drift.
      auto copy = heap;
      value = 0.0;
      err = 0.0;
      while (!copy.empty()) {
        value += copy.top().value;
        err += copy.top().err;
        copy.pop();
      }
      since_resum = 0;
    }
  }
  // Final exact sums in deterministic order.
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  value = 0.0;
  err = 0.0;
  for (const auto& p : all) {
    value += p.value;
    err += p.err;
  }
  if (!std::isfinite(value)) throw DomainError("integrand produced a non-finite value");
  return {value, err, evals, err <= tol.target(value)};
}

QuadResult integrate_singular(const Integrand& f, double alpha, double b, Tolerance tol,
                              std::size_t max_panels) {
  if (!(alpha > -1.0)) throw DomainError("integrate_singular requires alpha > -1");
  check_finite(b, "upper limit");
  if (b < 0.0) throw PreconditionError("integrate_singular requires b >= 0");
  if (b == 0.0) return {0.0, 0.0, 1, true};
  if (alpha >= 0.0) {
    auto g = [&](double s) { return s == 0.0 ? (alpha == 0.0 ? f(0.0) : 0.0) : std::pow(s, alpha) * f(s); };
    return integrate_adaptive(g, 0.0, b, tol, max_panels);
  }
  const double k = 1.0 + alpha;
  const double inv_k = 1.0 / k;
  auto g = [&](double u) { return f(std::pow(u, inv_k)); };
  const double upper = std::pow(b, k);
  Tolerance scaled{tol.abs * k, tol.rel};
  QuadResult r = integrate_adaptive(g, 0.0, upper, scaled, max_panels);
  r.value *= inv_k;
  r.err_est *= inv_k;
  r.converged = r.err_est <= tol.target(r.value);
  return r;
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0)) throw DomainError("hurwitz_zeta requires s > 1");
  if (!(q > 0.0)) throw DomainError("hurwitz_zeta requires q > 0");
  // Euler-Maclaurin with the direct sum pushed out to q + n >= 12.
  constexpr std::array<double, 8> kB2j = {1.0 / 6.0,   -1.0 / 30.0, 1.0 / 42.0,
                                          -1.0 / 30.0, 5.0 / 66.0,  -691.0 / 2730.0,
                                          7.0 / 6.0,   -3617.0 / 510.0};
  double sum = 0.0;
  double x = q;
  while (x < 12.0) {
    sum += std::pow(x, -s);
    x += 1.0;
  }
  const double xs = std::pow(x, -s);
  sum += x * xs / (s - 1.0) + 0.5 * xs;
  // term_j = B_2j / (2j)! * s (s+1) ... (s+2j-2) * x^(-s-2j+1)
  double rising = s;        // s (s+1) ... (s + 2j - 2)
  double factorial = 2.0;   // (2j)!
  double xpow = xs / x;     // x^(-s-1)
  for (std::size_t j = 1; j <= kB2j.size(); ++j) {
    const double term = kB2j[j - 1] / factorial * rising * xpow;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    const double m = static_cast<double>(2 * j);
    rising *= (s + m - 1.0) * (s + m);
    factorial *= (m + 1.0) * (m + 2.0);
    xpow /= x * x;
  }
  return sum;
}

QuadResult integrate_osc_tail(double beta, const Integrand& osc, double period, double a,
                              Tolerance tol, std::size_t max_periods) {
  if (!(beta > 1.0)) throw DivergenceError("tail envelope x^-beta needs beta > 1 to converge");
  if (!(period > 0.0) || !std::isfinite(period)) throw PreconditionError("period must be positive");
  if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("tail lower limit must be positive");

  // Budget split: each explicit period and the folded remainder share tol.abs.
  const std::size_t pieces = max_periods + 1;
  Tolerance piece_tol{tol.abs / static_cast<double>(pieces), tol.rel};

  QuadResult total{0.0, 0.0, 0, true};
  double x = a;
  auto weighted = [&](double xi) { return std::pow(xi, -beta) * osc(xi); };
  for (std::size_t k = 0; k < max_periods; ++k) {
    total += integrate_adaptive(weighted, x, x + period, piece_tol);
    x += period;
  }
  const double scale = std::pow(period, -beta);
  const double start = x;
  auto folded = [&](double v) {
    return osc(start + v) * scale * hurwitz_zeta(beta, (start + v) / period);
  };
  total += integrate_adaptive(folded, 0.0, period, piece_tol);
  total.converged = total.err_est <= tol.target(total.value);
  return total;
}

}  // namespace swelab::quad
