#include "swelab/solvability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "swelab/errors.hpp"
#include "swelab/quad.hpp"

namespace swelab::solvability {
namespace {

// Regime boundaries are compared with a small slack so that grid values
// such as 0.5000000000000001 from a parsed range land in the right case.
constexpr double kRegimeEps = 1e-12;

constexpr quad::Tolerance kSegmentTol{1e-15, 1e-13};

Regime regime_of(double h0) {
  if (std::abs(h0 - 0.5) <= kRegimeEps) return Regime::kTimeWhite;
  if (std::abs(h0 - 1.0) <= kRegimeEps) return Regime::kSmoothTime;
  return Regime::kIntermediate;
}

void require_g_args(double rho, double h0) {
  if (!std::isfinite(rho) || rho < 0.0) throw PreconditionError("rho must be finite and >= 0");
  if (!(h0 > 0.5)) throw DomainError("g functions need h0 > 1/2: s^(2 h0 - 2) is not integrable at 0");
  if (h0 > 1.0) throw PreconditionError("h0 must be <= 1");
}

// int_0^rho s^alpha f(s) ds: singular head on [0, min(rho, 1)], then
// panels no longer than pi.
double weighted_integral(const quad::Integrand& f, double alpha, double rho) {
  const double head_end = std::min(rho, 1.0);
  double sum = quad::integrate_singular(f, alpha, head_end, kSegmentTol).value;
  auto weighted = [&](double s) { return std::pow(s, alpha) * f(s); };
  for (double lo = head_end; lo < rho;) {
    const double hi = std::min(rho, lo + std::numbers::pi);
    sum += quad::integrate_adaptive(weighted, lo, hi, kSegmentTol).value;
    lo = hi;
  }
  return sum;
}

// Increment-slope exponent of the radial integrand: rho^e * bracket.
double radial_power(const HurstParams& p) {
  const double d = static_cast<double>(p.dimension());
  switch (regime_of(p.h0())) {
    case Regime::kTimeWhite:
      return 2.0 * d - 2.0 * p.h_sum() - 3.0;
    case Regime::kSmoothTime:
      return 2.0 * d - 2.0 * p.h_sum() - 5.0;
    case Regime::kIntermediate:
      break;
  }
  return 2.0 * d - 2.0 * p.h_sum() - 2.0 * p.h0() - 3.0;
}

double time_white_bracket(double rho, double t) { return 0.5 * t - std::sin(2.0 * t * rho) / (4.0 * rho); }

double smooth_time_bracket(double rho, double t) {
  const double c = std::cos(t * rho) - 1.0;
  return c * c;
}

// Gauss-Legendre nodes on [1, Lambda_top], one panel per oscillation period,
// with the panel boundaries at the cutoffs.
struct TailGrid {
  std::vector<double> lambda;
  std::vector<double> rho;
  std::vector<double> weight;
  std::vector<std::size_t> cutoff_end;  // node count up to lambda[k]
};

constexpr std::size_t kGaussOrder = 20;

TailGrid make_tail_grid(double t, double lambda_max, std::size_t n_cutoffs) {
  if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("t must be positive");
  if (!(lambda_max >= 64.0)) throw PreconditionError("lambda_max must be >= 2^6");
  if (n_cutoffs < 4) throw PreconditionError("at least 4 cutoffs are required");
  const double period = 2.0 * std::numbers::pi / t;
  const double scale = std::ldexp(1.0, static_cast<int>(n_cutoffs) - 1);
  const double m0 = std::floor(lambda_max / period / scale);
  if (m0 < 1.0 || m0 * period <= 1.0) {
    throw PreconditionError("lambda_max too small for the requested number of period-aligned cutoffs");
  }
  TailGrid g;
  for (std::size_t k = 0; k < n_cutoffs; ++k) g.lambda.push_back(m0 * std::ldexp(period, static_cast<int>(k)));

  using Rule = boost::math::quadrature::gauss<double, kGaussOrder>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  // Full rule on [-1, 1] in ascending order.
  std::vector<double> xs, ws;
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    xs.push_back(-x[i]);
    ws.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    xs.push_back(x[i]);
    ws.push_back(w[i]);
  }
  auto add_panel = [&](double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      g.rho.push_back(c + h * xs[i]);
      g.weight.push_back(h * ws[i]);
    }
  };
  double lo = 1.0;
  const auto total_periods = static_cast<std::size_t>(std::llround(g.lambda.back() / period));
  std::size_t next_cut = 0;
  for (std::size_t m = 1; m <= total_periods; ++m) {
    const double hi = static_cast<double>(m) * period;
    if (hi <= lo) continue;
    add_panel(lo, hi);
    lo = hi;
    if (next_cut < g.lambda.size() && std::abs(hi - g.lambda[next_cut]) <= 1e-9 * hi) {
      g.cutoff_end.push_back(g.rho.size());
      ++next_cut;
    }
  }
  return g;
}

TailFit fit_tail(const TailGrid& grid, const std::vector<double>& integrand) {
  TailFit fit{};
  fit.lambda_grid = grid.lambda;
  fit.negative_samples = static_cast<std::size_t>(
      std::count_if(integrand.begin(), integrand.end(), [](double v) { return v < -1e-12; }));
  std::vector<double> increments;
  long double running = 0.0L;
  std::size_t start = 0;
  for (std::size_t end : grid.cutoff_end) {
    long double piece = 0.0L;
    for (std::size_t i = start; i < end; ++i) piece += static_cast<long double>(grid.weight[i]) * integrand[i];
    if (start > 0) increments.push_back(static_cast<double>(piece));
    running += piece;
    fit.partial_integrals.push_back(static_cast<double>(running));
    start = end;
  }
  const bool positive = std::all_of(increments.begin(), increments.end(), [](double v) { return v > 0.0; });
  if (!positive) {
    fit.fitted_exponent = std::nan("");
    fit.r_squared = 0.0;
    fit.classified_convergent = false;
    fit.verdict = NumericVerdict::kIndeterminate;
    return fit;
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < increments.size(); ++k) {
    lx.push_back(std::log(grid.lambda[k]));
    ly.push_back(std::log(increments[k]));
  }
  const LinearFit lf = fit_line(lx, ly);
  fit.fitted_exponent = lf.slope;
  fit.r_squared = lf.r_squared;
  fit.classified_convergent = lf.slope < -kSlopeBand;
  if (lf.slope < -kSlopeBand) {
    fit.verdict = NumericVerdict::kConvergent;
  } else if (lf.slope > kSlopeBand) {
    fit.verdict = NumericVerdict::kDivergent;
  } else {
    fit.verdict = NumericVerdict::kIndeterminate;
  }
  return fit;
}

std::vector<double> g_on_grid(const TailGrid& grid, double h0, double t) {
  GMomentSweep sweep(h0);
  std::vector<double> out;
  out.reserve(grid.rho.size());
  for (double r : grid.rho) out.push_back(sweep.advance_to(t * r).g);
  return out;
}

std::vector<double> integrand_on_grid(const TailGrid& grid, const HurstParams& params, double t,
                                      const std::vector<double>* g_values) {
  const double e = radial_power(params);
  std::vector<double> out(grid.rho.size());
  const Regime regime = regime_of(params.h0());
  for (std::size_t i = 0; i < grid.rho.size(); ++i) {
    const double r = grid.rho[i];
    double bracket = 0.0;
    switch (regime) {
      case Regime::kTimeWhite:
        bracket = time_white_bracket(r, t);
        break;
      case Regime::kSmoothTime:
        bracket = smooth_time_bracket(r, t);
        break;
      case Regime::kIntermediate:
        bracket = (*g_values)[i];
        break;
    }
    out[i] = std::pow(r, e) * bracket;
  }
  return out;
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kTimeWhite:
      return "time-white";
    case Regime::kSmoothTime:
      return "smooth-time";
    case Regime::kIntermediate:
      return "intermediate";
  }
  return "unknown";
}

std::string to_string(NumericVerdict v) {
  switch (v) {
    case NumericVerdict::kConvergent:
      return "convergent";
    case NumericVerdict::kDivergent:
      return "divergent";
    case NumericVerdict::kIndeterminate:
      return "indeterminate";
  }
  return "unknown";
}

SolvabilityVerdict condition_closed_form(const HurstParams& params) {
  const double d = static_cast<double>(params.dimension());
  const double habs = params.h_sum();
  const Regime regime = regime_of(params.h0());
  double margin = 0.0;
  switch (regime) {
    case Regime::kTimeWhite:
      margin = habs - (d - 1.0);
      break;
    case Regime::kSmoothTime:
      margin = habs - (d - 2.0);
      break;
    case Regime::kIntermediate:
      margin = habs + params.h0() - (d - 0.5);
      break;
  }
  return {margin > 0.0, margin, regime};
}

double radial_integrand(double rho, const HurstParams& params, double t) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw PreconditionError("rho must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("t must be positive");
  const double lead = std::pow(rho, radial_power(params));
  switch (regime_of(params.h0())) {
    case Regime::kTimeWhite:
      return lead * time_white_bracket(rho, t);
    case Regime::kSmoothTime:
      return lead * smooth_time_bracket(rho, t);
    case Regime::kIntermediate:
      break;
  }
  return lead * g(t * rho, params.h0());
}

double g1(double rho, double h0) {
  require_g_args(rho, h0);
  if (rho == 0.0) return 0.0;
  return weighted_integral([rho](double s) { return (rho - s) * std::cos(s); }, 2.0 * h0 - 2.0, rho);
}

double g2(double rho, double h0) {
  require_g_args(rho, h0);
  if (rho == 0.0) return 0.0;
  return weighted_integral([rho](double s) { return std::sin(2.0 * rho - s) - std::sin(s); }, 2.0 * h0 - 2.0,
                           rho);
}

double g(double rho, double h0) { return 0.5 * g1(rho, h0) - 0.25 * g2(rho, h0); }

GMomentSweep::GMomentSweep(double h0) : alpha_(2.0 * h0 - 2.0) { require_g_args(0.0, h0); }

GValues GMomentSweep::advance_to(double rho) {
  if (!std::isfinite(rho) || rho < pos_) throw PreconditionError("GMomentSweep radii must be nondecreasing");
  const double a = alpha_;
  auto cos_f = [](double s) { return std::cos(s); };
  auto sin_f = [](double s) { return std::sin(s); };
  auto scos_f = [](double s) { return s * std::cos(s); };
  if (pos_ < 1.0 && rho > pos_) {
    // The head [0, 1] is done in one singular integral; earlier radii inside
    // it are recomputed from 0.
    const double end = std::min(rho, 1.0);
    c_ = quad::integrate_singular(cos_f, a, end, kSegmentTol).value;
    s_ = quad::integrate_singular(sin_f, a, end, kSegmentTol).value;
    s1_ = quad::integrate_singular(scos_f, a, end, kSegmentTol).value;
    pos_ = end;
  }
  while (pos_ < rho) {
    const double hi = std::min(rho, pos_ + 2.0);
    const double lo = pos_;
    c_ += quad::integrate_adaptive([&](double s) { return std::pow(s, a) * std::cos(s); }, lo, hi, kSegmentTol).value;
    s_ += quad::integrate_adaptive([&](double s) { return std::pow(s, a) * std::sin(s); }, lo, hi, kSegmentTol).value;
    s1_ += quad::integrate_adaptive([&](double s) { return std::pow(s, a + 1.0) * std::cos(s); }, lo, hi, kSegmentTol)
               .value;
    pos_ = hi;
  }
  GValues v{rho, 0.0, 0.0, 0.0};
  if (rho == 0.0) return v;
  v.g1 = rho * c_ - s1_;
  v.g2 = std::sin(2.0 * rho) * c_ - std::cos(2.0 * rho) * s_ - s_;
  v.g = 0.5 * v.g1 - 0.25 * v.g2;
  return v;
}

std::vector<GValues> g_curve(double h0, const std::vector<double>& rho_grid) {
  GMomentSweep sweep(h0);
  std::vector<GValues> out;
  out.reserve(rho_grid.size());
  for (double r : rho_grid) out.push_back(sweep.advance_to(r));
  return out;
}

double hyp1f2(const Hyp1F2Params& p, double z_max) {
  auto nonpositive_integer = [](double b) { return b <= 0.0 && b == std::floor(b); };
  if (nonpositive_integer(p.b1) || nonpositive_integer(p.b2)) {
    throw PreconditionError("1F2 lower parameters must not be nonpositive integers");
  }
  if (!std::isfinite(p.z) || !std::isfinite(p.a1)) throw PreconditionError("1F2 arguments must be finite");
  if (std::abs(p.z) > z_max) {
    throw RegimeError("1F2 series requested outside |z| <= z_max; use the asymptotic regression instead");
  }
  using LD = long double;
  LD term = 1.0L;
  LD sum = 1.0L;
  LD comp = 0.0L;  // Neumaier compensation
  const LD z = p.z;
  for (int k = 0; k < 100000; ++k) {
    const LD kk = k;
    const LD num = (static_cast<LD>(p.a1) + kk) * z;
    const LD den = (static_cast<LD>(p.b1) + kk) * (static_cast<LD>(p.b2) + kk) * (kk + 1.0L);
    term *= num / den;
    const LD next = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - next) + term;
    } else {
      comp += (term - next) + sum;
    }
    sum = next;
    if (term == 0.0L) break;
    // Only stop once the terms are shrinking for good.
    const bool decreasing = std::abs(num) < std::abs(den);
    if (decreasing && std::abs(term) < 1e-16L * std::abs(sum + comp)) break;
  }
  return static_cast<double>(sum + comp);
}

double sine_moment(double rho, double h0) {
  require_g_args(rho, h0);
  if (rho == 0.0) return 1.0;
  auto f = [rho](double s) { return s == 0.0 ? rho : std::sin(rho * s) / s; };
  const double integral = quad::integrate_singular(f, 2.0 * h0 - 2.0, 1.0, {1e-16, 1e-14}).value;
  return (2.0 * h0 - 1.0) / rho * integral;
}

LinearFit g1_asymptotic_slope(double h0, double rho_lo, double rho_hi, std::size_t n_points) {
  if (n_points < 3) throw PreconditionError("g1_asymptotic_slope needs n_points >= 3");
  if (!(rho_lo < rho_hi) || rho_lo < 0.0) throw PreconditionError("need 0 <= rho_lo < rho_hi");
  std::vector<double> rho(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    rho[i] = rho_lo + (rho_hi - rho_lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
  }
  const auto values = g_curve(h0, rho);
  std::vector<double> y;
  for (const auto& v : values) y.push_back(v.g1);
  return fit_line(rho, y);
}

TailFit classify_numeric(const HurstParams& params, double t, double lambda_max, std::size_t n_cutoffs) {
  const TailGrid grid = make_tail_grid(t, lambda_max, n_cutoffs);
  std::vector<double> gv;
  if (regime_of(params.h0()) == Regime::kIntermediate) gv = g_on_grid(grid, params.h0(), t);
  return fit_tail(grid, integrand_on_grid(grid, params, t, &gv));
}

bool PhaseRow::agrees() const {
  return numeric == (closed.solvable ? NumericVerdict::kConvergent : NumericVerdict::kDivergent);
}

std::string PhaseRow::flag() const {
  if (near_critical) return "near-critical";
  return agrees() ? "ok" : "mismatch";
}

std::vector<PhaseRow> phase_diagram_scan(std::size_t d, const std::vector<double>& h0_grid,
                                         const std::vector<double>& habs_grid, const PhaseScanConfig& cfg) {
  if (d == 0) throw PreconditionError("dimension must be positive");
  std::vector<PhaseRow> rows;
  if (h0_grid.empty() || habs_grid.empty()) return rows;
  const TailGrid grid = make_tail_grid(cfg.t, cfg.lambda_max, cfg.n_cutoffs);
  const double dd = static_cast<double>(d);
  for (double h0 : h0_grid) {
    if (!(h0 >= 0.5 - kRegimeEps && h0 <= 1.0 + kRegimeEps)) throw PreconditionError("h0 grid leaves [1/2, 1]");
    const double h0c = std::clamp(h0, 0.5, 1.0);
    // g depends only on h0 and t: one sweep serves every |H| in the row.
    std::vector<double> gv;
    if (regime_of(h0c) == Regime::kIntermediate) gv = g_on_grid(grid, h0c, cfg.t);
    for (double habs : habs_grid) {
      const double hi = habs / dd;
      if (!(hi > 0.0 && hi < 1.0)) continue;
      const HurstParams params = HurstParams::uniform(d, h0c, habs);
      PhaseRow row{};
      row.h0 = h0c;
      row.habs = habs;
      row.closed = condition_closed_form(params);
      const TailFit fit = fit_tail(grid, integrand_on_grid(grid, params, cfg.t, &gv));
      row.numeric = fit.verdict;
      row.fitted_exponent = fit.fitted_exponent;
      row.near_critical = std::abs(row.closed.margin) < cfg.exclusion_band;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace swelab::solvability
