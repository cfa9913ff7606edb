#include "swelab/spectral_series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swelab/errors.hpp"

namespace swelab::kernels {
namespace {

// Frequencies closer than this (relative) are treated as equal; differences
// of nearly equal frequencies below it are snapped to zero.
constexpr double kOmegaRelTol = 1e-12;

bool same_omega(double a, double b) {
  return std::abs(a - b) <= kOmegaRelTol * std::max({1.0, a, b});
}

}  // namespace

SpectralSeries::SpectralSeries(std::initializer_list<SpectralTerm> terms) {
  for (const auto& t : terms) add(t);
}

void SpectralSeries::add(SpectralTerm term) {
  if (term.omega < 0.0) {
    term.omega = -term.omega;
    if (term.kind == Trig::kSin) term.coef = -term.coef;
  }
  if (term.kind == Trig::kSin && term.omega == 0.0) return;
  if (term.coef == 0.0) return;
  terms_.push_back(term);
}

SpectralSeries SpectralSeries::operator*(const SpectralSeries& other) const {
  SpectralSeries out;
  for (const auto& l : terms_) {
    for (const auto& r : other.terms_) {
      const double c = 0.5 * l.coef * r.coef;
      const double p = l.power + r.power;
      double diff = l.omega - r.omega;
      if (std::abs(diff) <= kOmegaRelTol * (l.omega + r.omega)) diff = 0.0;
      const double sum = l.omega + r.omega;
      if (l.kind == Trig::kCos && r.kind == Trig::kCos) {
        out.add({c, p, diff, Trig::kCos});
        out.add({c, p, sum, Trig::kCos});
      } else if (l.kind == Trig::kSin && r.kind == Trig::kSin) {
        out.add({c, p, diff, Trig::kCos});
        out.add({-c, p, sum, Trig::kCos});
      } else if (l.kind == Trig::kSin) {  // sin a cos b
        out.add({c, p, sum, Trig::kSin});
        out.add({c, p, diff, Trig::kSin});
      } else {  // cos a sin b
        out.add({c, p, sum, Trig::kSin});
        out.add({-c, p, diff, Trig::kSin});
      }
    }
  }
  out.simplify();
  return out;
}

SpectralSeries SpectralSeries::operator*(double factor) const {
  SpectralSeries out = *this;
  for (auto& t : out.terms_) t.coef *= factor;
  out.simplify();
  return out;
}

SpectralSeries SpectralSeries::operator+(const SpectralSeries& other) const {
  SpectralSeries out = *this;
  for (const auto& t : other.terms_) out.add(t);
  out.simplify();
  return out;
}

double SpectralSeries::operator()(double xi) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    const double trig = t.kind == Trig::kCos ? std::cos(t.omega * xi) : std::sin(t.omega * xi);
    sum += t.coef * std::pow(xi, -t.power) * trig;
  }
  return sum;
}

void SpectralSeries::simplify() {
  std::vector<SpectralTerm> merged;
  for (const auto& t : terms_) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const SpectralTerm& m) {
      return m.kind == t.kind && m.power == t.power && same_omega(m.omega, t.omega);
    });
    if (it == merged.end()) {
      merged.push_back(t);
    } else {
      it->coef += t.coef;
    }
  }
  // Drop terms that cancelled to round-off relative to the largest coefficient.
  double cmax = 0.0;
  for (const auto& t : merged) cmax = std::max(cmax, std::abs(t.coef));
  std::erase_if(merged, [&](const SpectralTerm& t) { return std::abs(t.coef) <= 1e-15 * cmax; });
  std::sort(merged.begin(), merged.end(), [](const SpectralTerm& l, const SpectralTerm& r) {
    if (l.power != r.power) return l.power < r.power;
    if (l.kind != r.kind) return l.kind < r.kind;
    return l.omega < r.omega;
  });
  terms_ = std::move(merged);
}

SpectralSeries::TailResult SpectralSeries::integrate_tail(double a, double rel_tol, double abs_tol,
                                                          std::size_t max_periods) const {
  TailResult out{{0.0, 0.0, 0, true}, 0.0};
  if (terms_.empty()) return out;
  std::vector<double> scales;
  scales.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!(t.power > 1.0)) throw DivergenceError("spectral tail term is not integrable at infinity");
    scales.push_back(std::abs(t.coef) * std::pow(a, 1.0 - t.power) / (t.power - 1.0));
  }
  for (double s : scales) out.magnitude += s;
  const double n = static_cast<double>(terms_.size());
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& t = terms_[k];
    if (t.omega == 0.0) {
      out.result.value += t.coef * std::pow(a, 1.0 - t.power) / (t.power - 1.0);
      continue;
    }
    const double omega = t.omega;
    quad::Integrand osc;
    if (t.kind == Trig::kCos) {
      osc = [omega](double xi) { return std::cos(omega * xi); };
    } else {
      osc = [omega](double xi) { return std::sin(omega * xi); };
    }
    const double coef_abs = std::abs(t.coef);
    // Purely absolute budget tied to the envelope scale: a term-relative
    // budget lets terms that later cancel each other overspend it.
    quad::Tolerance tol{std::max(abs_tol / n, rel_tol * out.magnitude / n) / coef_abs, 0.0};
    quad::QuadResult r =
        quad::integrate_osc_tail(t.power, osc, 2.0 * std::numbers::pi / omega, a, tol, max_periods);
    r.value *= t.coef;
    r.err_est *= coef_abs;
    out.result += r;
  }
  return out;
}

}  // namespace swelab::kernels
