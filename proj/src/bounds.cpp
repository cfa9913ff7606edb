#include "swelab/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "swelab/errors.hpp"
#include "swelab/params.hpp"
#include "swelab/rng.hpp"

namespace swelab::bounds {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLatticeTol = 1e-9;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError(std::string(name) + " must be finite and > 0");
}

std::size_t count_steps(double length, double step) {
  const double k = length / step;
  const double r = std::round(k);
  if (std::abs(k - r) > kLatticeTol * std::max(1.0, r)) {
    throw PreconditionError("length is not a whole number of lattice steps");
  }
  return static_cast<std::size_t>(r);
}

// Symmetric lattice -L, -L + dx, ..., L.
std::vector<double> centered_lattice(double L, double dx) {
  const std::size_t n = 2 * count_steps(L, dx) + 1;
  return field::uniform_lattice(-L, dx, n);
}

void require_cap(std::size_t n) {
  if (n > field::kMaxPoints) {
    throw PreconditionError("experiment cell needs " + std::to_string(n) + " points, above the dense cap of " +
                            std::to_string(field::kMaxPoints));
  }
}

struct CellInput {
  Coordinates coords;
  field::PointSet points;
  const field::IncrementMap* increments = nullptr;
  field::Statistic increment_stat = field::Statistic::kSupIncrementSpatial;
};

CellEstimate run_cell(std::size_t cell, const CellInput& in, double H, std::size_t n_reps, std::uint64_t seed,
                      const kernels::KernelConfig& kcfg, const BatchSink& sink) {
  require_cap(in.points.size());
  field::CovarianceMatrix c = field::assemble_cov(in.points, H, kcfg);
  const field::Factor f = field::factorize_psd(c);
  const field::SampleBatch batch = field::sample(f, n_reps, seed);
  if (sink) sink(cell, in.coords, in.points, batch);
  CellEstimate e{in.coords, {}, {}, in.points.size(), f.relative_jitter};
  if (in.increments == nullptr) {
    e.sup = field::mc_sup(batch, field::Statistic::kSup);
    e.sup_abs = field::mc_sup(batch, field::Statistic::kSupAbs);
  } else {
    e.sup = field::mc_sup(batch, in.increment_stat, in.increments, false);
    e.sup_abs = field::mc_sup(batch, in.increment_stat, in.increments, true);
  }
  return e;
}

FitSummary make_fit(std::string name, std::string x_label, std::string y_label, const std::vector<double>& x,
                    const std::vector<double>& y, double slope_lo, double slope_hi, double r2_min) {
  const stats::LinearFit fit = stats::fit_line(x, y);
  const auto [lo, hi] = stats::slope_ci(fit);
  const bool pass = fit.slope >= slope_lo && fit.slope <= slope_hi && fit.r_squared >= r2_min;
  return {std::move(name), std::move(x_label), std::move(y_label), fit, lo, hi, slope_lo, slope_hi, r2_min, pass};
}

// sup <= sup_abs holds replicate by replicate, hence for the means too.
Check ordering_check(const std::vector<CellEstimate>& cells) {
  const auto bad = std::count_if(cells.begin(), cells.end(),
                                 [](const CellEstimate& e) { return e.sup.mean > e.sup_abs.mean; });
  return {"sup_le_sup_abs_violations", static_cast<double>(bad), 0.0, 0.0, bad == 0};
}

void finish(ExperimentReport& r, std::chrono::steady_clock::time_point start) {
  r.pass = std::all_of(r.fits.begin(), r.fits.end(), [](const FitSummary& f) { return f.pass; }) &&
           std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require_reps(std::size_t n_reps) {
  if (n_reps < 2) throw PreconditionError("n_reps must be at least 2 (standard error undefined otherwise)");
}

void require_octaves(const std::vector<double>& v, const char* name) {
  if (v.size() < 3) throw PreconditionError(std::string(name) + " needs at least 3 values for a slope fit");
  for (double x : v) require_positive(x, name);
}

}  // namespace

double phi0(double T, double L) {
  require_positive(T, "T");
  require_positive(L, "L");
  if (L < T) return 1.0;
  return 1.0 + std::sqrt(std::log2(L / T));
}

double phi(double T, double L, double H) {
  require_spatial_hurst(H);
  return std::pow(T, 0.5 + H) * phi0(T, L);
}

double D1H(kernels::SpaceTimePoint p, kernels::SpaceTimePoint q, double H) {
  if (!std::isfinite(p.t) || !std::isfinite(q.t) || !std::isfinite(p.x) || !std::isfinite(q.x)) {
    throw PreconditionError("D1H: non-finite coordinate");
  }
  if (p.t < 0.0 || q.t < 0.0) throw PreconditionError("D1H: times must be >= 0");
  require_spatial_hurst(H);
  const double lo = std::min(p.t, q.t);
  const double hi = std::max(p.t, q.t);
  const double space = std::min(std::pow(std::abs(p.x - q.x), H), std::pow(lo, H));
  return std::sqrt(lo) * space + std::sqrt(hi) * std::pow(hi - lo, H);
}

RatioScanResult metric_ratio_scan(const std::vector<double>& t_set, const std::vector<double>& s_set,
                                  const std::vector<double>& dx_set, double H, const kernels::KernelConfig& cfg) {
  require_spatial_hurst(H);
  RatioScanResult r;
  r.n_t = t_set.size();
  r.n_s = s_set.size();
  r.n_dx = dx_set.size();
  std::map<double, double> var;
  auto variance = [&](double t) {
    auto it = var.find(t);
    if (it == var.end()) it = var.emplace(t, kernels::variance(t, H, cfg)).first;
    return it->second;
  };
  for (double t : t_set) {
    for (double s : s_set) {
      for (double dx : dx_set) {
        const kernels::SpaceTimePoint p{t, 0.0};
        const kernels::SpaceTimePoint q{s, dx};
        const double D = D1H(p, q, H);
        if (D == 0.0) {
          ++r.degenerate_skipped;
          continue;
        }
        const double radicand = variance(t) + variance(s) - 2.0 * kernels::cov(p, q, H, cfg);
        if (radicand < 0.0) ++r.roundoff_flags;
        const double ratio = std::sqrt(std::max(radicand, 0.0)) / D;
        ++r.evaluated;
        if (ratio < r.r_min) {
          r.r_min = ratio;
          r.argmin = {t, s, dx};
        }
        if (ratio > r.r_max) {
          r.r_max = ratio;
          r.argmax = {t, s, dx};
        }
      }
    }
  }
  if (r.evaluated == 0) throw PreconditionError("metric_ratio_scan: no nondegenerate pair in the grid");
  return r;
}

std::vector<double> refine_geometric(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) {
      if (!(v[i - 1] > 0.0)) throw PreconditionError("geometric refinement needs positive values");
      out.push_back(std::sqrt(v[i - 1] * v[i]));
    }
    out.push_back(v[i]);
  }
  return out;
}

std::vector<double> refine_arithmetic(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out.push_back(0.5 * (v[i - 1] + v[i]));
    out.push_back(v[i]);
  }
  return out;
}

std::string GridRule::describe() const {
  std::ostringstream os;
  os << "dx <= t_min/" << x_per_tmin << ", dt <= T/" << time_levels;
  return os.str();
}

ExperimentReport sup_growth_experiment(const GrowthConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  require_spatial_hurst(cfg.H);
  require_reps(cfg.n_reps);
  require_octaves(cfg.T_list, "T_list");
  require_octaves(cfg.L_list, "L_list");
  require_positive(cfg.lscan_T, "lscan_T");
  if (cfg.rule.x_per_tmin == 0 || cfg.rule.time_levels == 0) throw PreconditionError("grid rule must be positive");
  for (double L : cfg.L_list) {
    if (L < cfg.lscan_T) throw PreconditionError("every L must be >= T");
  }

  ExperimentReport rep;
  rep.id = "sup_growth";
  rep.params = {{"H", cfg.H}, {"lscan_T", cfg.lscan_T}};
  rep.seed = cfg.seed;
  rep.n_reps = cfg.n_reps;
  rep.grid_rule = cfg.rule.describe() + "; L-scan cells: single row t = T, dx = T/" +
                  std::to_string(cfg.rule.x_per_tmin);

  // Build every cell up front so cap violations surface before any sampling.
  std::vector<CellInput> cells;
  const double levels = static_cast<double>(cfg.rule.time_levels);
  for (double T : cfg.T_list) {
    const double dt = T / levels;
    std::vector<double> times;
    for (std::size_t k = 1; k <= cfg.rule.time_levels; ++k) times.push_back(dt * static_cast<double>(k));
    field::GridSpec g{times, centered_lattice(T, dt / static_cast<double>(cfg.rule.x_per_tmin))};
    require_cap(g.size());
    cells.push_back({{{"T", T}, {"L", T}}, field::PointSet::full(g)});
  }
  const double T1 = cfg.lscan_T;
  for (double L : cfg.L_list) {
    field::GridSpec g{{T1}, centered_lattice(L, T1 / static_cast<double>(cfg.rule.x_per_tmin))};
    require_cap(g.size());
    cells.push_back({{{"T", T1}, {"L", L}}, field::PointSet::full(g)});
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    rep.estimates.push_back(run_cell(i, cells[i], cfg.H, cfg.n_reps, rng::derive_seed(cfg.seed, i), cfg.kernel, cfg.sink));
  }

  const std::size_t nT = cfg.T_list.size();
  std::vector<double> lx, ly, px, py;
  for (std::size_t i = 0; i < nT; ++i) {
    lx.push_back(std::log(cfg.T_list[i]));
    ly.push_back(std::log(rep.estimates[i].sup.mean));
  }
  for (std::size_t i = 0; i < cfg.L_list.size(); ++i) {
    px.push_back(phi0(T1, cfg.L_list[i]));
    py.push_back(rep.estimates[nT + i].sup.mean);
  }
  const double target = cfg.H + 0.5;
  rep.fits.push_back(make_fit("T_scan_loglog", "log T", "log E[sup u]", lx, ly, target - cfg.slope_tol,
                              target + cfg.slope_tol, -kInf));
  rep.fits.push_back(make_fit("L_scan_vs_phi0", "phi0(T, L)", "E[sup u]", px, py, 0.0, kInf, cfg.r2_min));

  // Envelope constants: c = min E[sup u]/Phi, C = max E[sup|u|]/Phi.
  double c = kInf, C = 0.0;
  for (const auto& e : rep.estimates) {
    const double p = phi(e.coords[0].second, e.coords[1].second, cfg.H);
    c = std::min(c, e.sup.mean / p);
    C = std::max(C, e.sup_abs.mean / p);
  }
  std::size_t outside = 0;
  for (const auto& e : rep.estimates) {
    const double p = phi(e.coords[0].second, e.coords[1].second, cfg.H);
    if (e.sup.mean < c * p * (1.0 - 1e-12) || e.sup_abs.mean > C * p * (1.0 + 1e-12)) ++outside;
  }
  rep.checks.push_back({"envelope_lower_c", c, 0.0, kInf, c > 0.0 && std::isfinite(c)});
  rep.checks.push_back({"envelope_upper_C", C, c, kInf, C >= c && std::isfinite(C)});
  rep.checks.push_back({"envelope_violations", static_cast<double>(outside), 0.0, 0.0, outside == 0});
  rep.checks.push_back(ordering_check(rep.estimates));
  finish(rep, start);
  return rep;
}

ExperimentReport holder_space_experiment(const HolderSpaceConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  require_spatial_hurst(cfg.H);
  require_reps(cfg.n_reps);
  require_positive(cfg.t, "t");
  require_positive(cfg.L, "L");
  require_octaves(cfg.h_list, "h_list");
  if (cfg.L < cfg.t) throw PreconditionError("holder_space_experiment requires L >= t");
  if (cfg.rule.x_per_tmin == 0) throw PreconditionError("grid rule must be positive");
  const double h_cap = cfg.h_max_fraction * std::min(cfg.t, 1.0);
  const double sup_dx = cfg.t / static_cast<double>(cfg.rule.x_per_tmin);
  for (double h : cfg.h_list) {
    if (h > h_cap * (1.0 + kLatticeTol)) throw PreconditionError("every h must be <= h_max_fraction * min(t, 1)");
  }

  ExperimentReport rep;
  rep.id = "holder_space";
  rep.params = {{"H", cfg.H}, {"t", cfg.t}, {"L", cfg.L}};
  rep.seed = cfg.seed;
  rep.n_reps = cfg.n_reps;
  rep.grid_rule = cfg.rule.describe() + "; sup over x in [-L, L] with step t/" +
                  std::to_string(cfg.rule.x_per_tmin) + ", partners at x + h";

  std::vector<CellInput> cells;
  std::vector<field::IncrementMap> maps;
  maps.reserve(cfg.h_list.size());
  for (double h : cfg.h_list) {
    // Fine lattice of step h on [-L, L + h]; base points every `stride` steps.
    const std::size_t stride = count_steps(sup_dx, h);
    if (stride == 0) throw PreconditionError("h must not exceed the sup lattice step");
    const std::size_t n_base = 2 * count_steps(cfg.L, sup_dx) + 1;
    const std::size_t n_fine = (n_base - 1) * stride + 2;
    field::GridSpec g{{cfg.t}, field::uniform_lattice(-cfg.L, h, n_fine)};
    std::vector<char> used(n_fine, 0);
    for (std::size_t j = 0; j < n_base; ++j) used[j * stride] = used[j * stride + 1] = 1;
    field::PointSet ps;
    ps.grid = g;
    std::vector<std::size_t> pos(n_fine, 0);
    for (std::size_t k = 0; k < n_fine; ++k) {
      if (!used[k]) continue;
      pos[k] = ps.index.size();
      ps.index.emplace_back(0, k);
    }
    field::IncrementMap m{{}, h};
    for (std::size_t j = 0; j < n_base; ++j) m.pairs.emplace_back(pos[j * stride + 1], pos[j * stride]);
    maps.push_back(std::move(m));
    cells.push_back({{{"h", h}, {"t", cfg.t}, {"L", cfg.L}}, std::move(ps), &maps.back(),
                     field::Statistic::kSupIncrementSpatial});
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rep.estimates.push_back(run_cell(i, cells[i], cfg.H, cfg.n_reps, rng::derive_seed(cfg.seed, i), cfg.kernel, cfg.sink));
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
    lx.push_back(std::log(cfg.h_list[i]));
    ly.push_back(std::log(rep.estimates[i].sup.mean));
  }
  rep.fits.push_back(make_fit("h_scan_loglog", "log h", "log E[sup_x delta_h u]", lx, ly, cfg.H - cfg.slope_tol,
                              cfg.H + cfg.slope_tol, -kInf));
  rep.checks.push_back(ordering_check(rep.estimates));
  finish(rep, start);
  return rep;
}

ExperimentReport holder_time_experiment(const HolderTimeConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  require_spatial_hurst(cfg.H);
  require_reps(cfg.n_reps);
  require_positive(cfg.L, "L");
  require_octaves(cfg.tau_list, "tau_list");
  if (cfg.t_values.empty()) throw PreconditionError("t_values must not be empty");
  for (double t : cfg.t_values) require_positive(t, "t");
  if (cfg.rule.x_per_tmin == 0) throw PreconditionError("grid rule must be positive");
  const double t_min = *std::min_element(cfg.t_values.begin(), cfg.t_values.end());
  for (double tau : cfg.tau_list) {
    if (tau > cfg.L) throw PreconditionError("holder_time_experiment requires L >= tau");
    if (tau > cfg.tau_max_fraction * std::min(t_min, 1.0) * (1.0 + kLatticeTol)) {
      throw PreconditionError("every tau must be <= tau_max_fraction * min(t, 1)");
    }
  }

  ExperimentReport rep;
  rep.id = "holder_time";
  rep.params = {{"H", cfg.H}, {"L", cfg.L}};
  rep.seed = cfg.seed;
  rep.n_reps = cfg.n_reps;
  for (std::size_t i = 0; i < cfg.t_values.size(); ++i) rep.params.emplace_back("t" + std::to_string(i), cfg.t_values[i]);
  const double dx = t_min / static_cast<double>(cfg.rule.x_per_tmin);
  rep.grid_rule = cfg.rule.describe() + "; sup over x in [-L, L] with step min(t)/" +
                  std::to_string(cfg.rule.x_per_tmin) + ", levels {t, t + tau}";

  const std::vector<double> xs = centered_lattice(cfg.L, dx);
  std::vector<CellInput> cells;
  std::vector<field::IncrementGrid> grids;
  grids.reserve(cfg.t_values.size() * cfg.tau_list.size());
  for (double t : cfg.t_values) {
    for (double tau : cfg.tau_list) {
      grids.push_back(field::increment_grid_temporal(field::GridSpec{{t}, xs}, tau));
      cells.push_back({{{"tau", tau}, {"t", t}, {"L", cfg.L}}, field::PointSet::full(grids.back().grid),
                       &grids.back().map, field::Statistic::kSupIncrementTemporal});
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rep.estimates.push_back(run_cell(i, cells[i], cfg.H, cfg.n_reps, rng::derive_seed(cfg.seed, i), cfg.kernel, cfg.sink));
  }

  const std::size_t n_tau = cfg.tau_list.size();
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n_tau; ++i) {
    lx.push_back(std::log(cfg.tau_list[i]));
    ly.push_back(std::log(rep.estimates[i].sup.mean));
  }
  rep.fits.push_back(make_fit("tau_scan_loglog", "log tau", "log E[sup_x delta_tau u]", lx, ly,
                              cfg.H - cfg.slope_tol, cfg.H + cfg.slope_tol, -kInf));
  for (std::size_t k = 1; k < cfg.t_values.size(); ++k) {
    const double expected = std::sqrt(cfg.t_values[k] / cfg.t_values[0]);
    for (std::size_t i = 0; i < n_tau; ++i) {
      const double ratio = rep.estimates[k * n_tau + i].sup.mean / rep.estimates[i].sup.mean;
      std::ostringstream name;
      name << "sqrt_t_ratio_t" << k << "_tau" << i;
      const double lo = expected * (1.0 - cfg.ratio_tol);
      const double hi = expected * (1.0 + cfg.ratio_tol);
      rep.checks.push_back({name.str(), ratio, lo, hi, ratio >= lo && ratio <= hi});
    }
  }
  rep.checks.push_back(ordering_check(rep.estimates));
  finish(rep, start);
  return rep;
}

}  // namespace swelab::bounds
