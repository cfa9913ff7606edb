#include "swelab/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "swelab/errors.hpp"
#include "swelab/rng.hpp"

namespace swelab::field {
namespace {

constexpr double kLatticeTol = 1e-9;

std::size_t lattice_steps(double shift, double dx) {
  const double k = shift / dx;
  const double r = std::round(k);
  if (r < 1.0 || std::abs(k - r) > kLatticeTol * std::max(1.0, r)) {
    throw PreconditionError("shift is not a positive multiple of the lattice spacing");
  }
  return static_cast<std::size_t>(r);
}

// Lattice spacing rounded to 40 significant bits, so that translating the
// whole lattice (which perturbs the computed spacing in its last bits)
// leaves every kernel argument, and hence the matrix, bit-identical.
double snapped_spacing(double dx) {
  if (dx == 0.0) return 0.0;
  int e = 0;
  std::frexp(dx, &e);
  return std::ldexp(std::round(std::ldexp(dx, 40 - e)), e - 40);
}

}  // namespace

void GridSpec::validate() const {
  if (t_values.empty() || x_values.empty()) throw PreconditionError("grid must have at least one time and one x");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] > 0.0) || !std::isfinite(t_values[i])) throw PreconditionError("grid times must be > 0");
    if (i > 0 && !(t_values[i] > t_values[i - 1])) throw PreconditionError("grid times must increase strictly");
  }
  for (double x : x_values) {
    if (!std::isfinite(x)) throw PreconditionError("grid x values must be finite");
  }
  if (x_values.size() > 1) {
    const double h = x_values[1] - x_values[0];
    if (!(h > 0.0)) throw PreconditionError("grid x values must increase strictly");
    for (std::size_t j = 1; j < x_values.size(); ++j) {
      const double step = x_values[j] - x_values[j - 1];
      if (std::abs(step - h) > kLatticeTol * h) throw PreconditionError("grid x values must be uniformly spaced");
    }
  }
}

double GridSpec::dx() const {
  if (x_values.size() < 2) return 0.0;
  return (x_values.back() - x_values.front()) / static_cast<double>(x_values.size() - 1);
}

std::vector<double> uniform_lattice(double x0, double dx, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = x0 + dx * static_cast<double>(k);
  return out;
}

PointSet PointSet::full(GridSpec grid) {
  PointSet p;
  p.index.reserve(grid.size());
  for (std::size_t i = 0; i < grid.t_values.size(); ++i)
    for (std::size_t j = 0; j < grid.x_values.size(); ++j) p.index.emplace_back(i, j);
  p.grid = std::move(grid);
  return p;
}

kernels::SpaceTimePoint PointSet::point(std::size_t i) const {
  const auto [it, ix] = index.at(i);
  return {grid.t_values.at(it), grid.x_values.at(ix)};
}

std::size_t PointSet::find(std::size_t it, std::size_t ix) const {
  const auto pos = std::find(index.begin(), index.end(), std::make_pair(it, ix));
  if (pos == index.end()) throw PreconditionError("lattice point is not part of the point set");
  return static_cast<std::size_t>(pos - index.begin());
}

CovarianceMatrix assemble_cov(const PointSet& points, double H, const kernels::KernelConfig& cfg) {
  points.grid.validate();
  const std::size_t n = points.size();
  if (n == 0) throw PreconditionError("empty point set");
  if (n > kMaxPoints) throw PreconditionError("point set exceeds the dense grid cap of 4096 points");
  for (const auto& [it, ix] : points.index) {
    if (it >= points.grid.t_values.size() || ix >= points.grid.x_values.size()) {
      throw PreconditionError("point index outside the grid");
    }
  }
  const double dx = snapped_spacing(points.grid.dx());
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> cache;
  CovarianceMatrix out;
  out.points = points;
  out.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      auto [ta, xa] = points.index[a];
      auto [tb, xb] = points.index[b];
      if (ta > tb) std::swap(ta, tb);
      const std::size_t lag = xa > xb ? xa - xb : xb - xa;
      const auto key = std::make_tuple(ta, tb, lag);
      auto hit = cache.find(key);
      if (hit == cache.end()) {
        const double v = kernels::cov({points.grid.t_values[ta], 0.0},
                                      {points.grid.t_values[tb], static_cast<double>(lag) * dx}, H, cfg);
        hit = cache.emplace(key, v).first;
      }
      out.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = hit->second;
      out.entries(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = hit->second;
    }
  }
  out.kernel_evaluations = cache.size();
  return out;
}

CovarianceMatrix assemble_cov(const GridSpec& grid, double H, const kernels::KernelConfig& cfg) {
  return assemble_cov(PointSet::full(grid), H, cfg);
}

Factor factorize_psd(const Eigen::MatrixXd& c, const FactorizeOptions& opt) {
  if (c.rows() != c.cols() || c.rows() == 0) throw PreconditionError("covariance must be a nonempty square matrix");
  const double scale = c.cwiseAbs().maxCoeff();
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw PreconditionError("covariance matrix is not symmetric");
  }
  const double mean_diag = c.diagonal().mean();
  if (!(mean_diag > 0.0)) throw PreconditionError("covariance diagonal must be positive on average");

  Factor f;
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  double rel = opt.jitter_start;
  double last_failed = 0.0;
  for (std::size_t attempt = 0; llt.info() != Eigen::Success; ++attempt) {
    last_failed = f.relative_jitter;
    if (attempt >= opt.max_attempts || rel > opt.max_relative_jitter) {
      throw FactorizationError("covariance is not positive definite within the allowed jitter", last_failed);
    }
    f.relative_jitter = rel;
    f.jitter_applied = rel * mean_diag;
    Eigen::MatrixXd shifted = c;
    shifted.diagonal().array() += f.jitter_applied;
    llt.compute(shifted);
    rel *= opt.jitter_factor;
  }
  f.lower = llt.matrixL();
  return f;
}

Factor factorize_psd(CovarianceMatrix& c, const FactorizeOptions& opt) {
  Factor f = factorize_psd(c.entries, opt);
  c.jitter_applied = f.jitter_applied;
  return f;
}

SampleBatch sample(const Factor& factor, std::size_t n_reps, std::uint64_t seed) {
  if (n_reps == 0) throw PreconditionError("n_reps must be positive");
  const Eigen::Index n = factor.lower.rows();
  SampleBatch batch;
  batch.seed = seed;
  batch.values.resize(static_cast<Eigen::Index>(n_reps), n);
  Eigen::VectorXd z(n);
  for (std::size_t r = 0; r < n_reps; ++r) {
    rng::NormalStream(seed, r).fill(z.data(), static_cast<std::uint64_t>(n));
    batch.values.row(static_cast<Eigen::Index>(r)) =
        (factor.lower.triangularView<Eigen::Lower>() * z).transpose();
  }
  return batch;
}

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::kSup:
      return "sup";
    case Statistic::kSupAbs:
      return "sup_abs";
    case Statistic::kSupIncrementSpatial:
      return "sup_increment_spatial";
    case Statistic::kSupIncrementTemporal:
      return "sup_increment_temporal";
  }
  return "unknown";
}

SupEstimate mc_sup(const SampleBatch& batch, Statistic statistic, const IncrementMap* increments, bool absolute) {
  const std::size_t n = batch.n_reps();
  if (n < 2) throw PreconditionError("at least two replicates are needed for a standard error");
  if (batch.values.cols() == 0) throw PreconditionError("empty batch");
  const bool is_increment =
      statistic == Statistic::kSupIncrementSpatial || statistic == Statistic::kSupIncrementTemporal;
  if (is_increment && (increments == nullptr || increments->pairs.empty())) {
    throw PreconditionError("increment statistics need a nonempty increment map");
  }
  std::vector<double> per_rep(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = batch.values.row(static_cast<Eigen::Index>(r));
    double best = -INFINITY;
    if (!is_increment) {
      best = statistic == Statistic::kSupAbs ? row.cwiseAbs().maxCoeff() : row.maxCoeff();
    } else {
      for (const auto& [p, m] : increments->pairs) {
        double v = row(static_cast<Eigen::Index>(p)) - row(static_cast<Eigen::Index>(m));
        if (absolute) v = std::abs(v);
        best = std::max(best, v);
      }
    }
    per_rep[r] = best;
  }
  double mean = 0.0;
  for (double v : per_rep) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : per_rep) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, sd / std::sqrt(static_cast<double>(n)), n, batch.seed, statistic,
          absolute || statistic == Statistic::kSupAbs};
}

IncrementGrid increment_grid_spatial(const GridSpec& grid, double h) {
  grid.validate();
  if (!(h != 0.0) || !std::isfinite(h)) throw PreconditionError("spatial shift h must be nonzero");
  if (grid.x_values.size() < 2) throw PreconditionError("spatial increments need at least two x values");
  const std::size_t k = lattice_steps(std::abs(h), grid.dx());
  const std::size_t nx = grid.x_values.size();
  IncrementGrid out{grid, {{}, h}};
  for (std::size_t i = 0; i < grid.t_values.size(); ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      // partner index j + k (h > 0) or j - k (h < 0); drop points whose partner leaves the lattice
      if (h > 0.0 ? j + k >= nx : j < k) continue;
      const std::size_t partner = h > 0.0 ? j + k : j - k;
      out.map.pairs.emplace_back(i * nx + partner, i * nx + j);
    }
  }
  return out;
}

IncrementGrid increment_grid_temporal(const GridSpec& grid, double tau) {
  grid.validate();
  if (!(tau > 0.0) || !std::isfinite(tau)) throw PreconditionError("temporal shift tau must be positive");
  auto match = [](double a, double b) { return std::abs(a - b) <= kLatticeTol * std::max(1.0, std::abs(b)); };
  std::vector<double> times = grid.t_values;
  for (double t : grid.t_values) {
    const double target = t + tau;
    if (std::none_of(times.begin(), times.end(), [&](double s) { return match(s, target); })) {
      times.push_back(target);
    }
  }
  std::sort(times.begin(), times.end());
  IncrementGrid out{{times, grid.x_values}, {{}, tau}};
  const std::size_t nx = grid.x_values.size();
  auto level = [&](double t) {
    return static_cast<std::size_t>(
        std::find_if(times.begin(), times.end(), [&](double s) { return match(s, t); }) - times.begin());
  };
  for (double t : grid.t_values) {
    const std::size_t lo = level(t);
    const std::size_t hi = level(t + tau);
    for (std::size_t j = 0; j < nx; ++j) out.map.pairs.emplace_back(hi * nx + j, lo * nx + j);
  }
  return out;
}

}  // namespace swelab::field
