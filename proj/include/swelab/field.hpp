#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "swelab/kernels.hpp"

namespace swelab::field {

/// Hard cap on the number of sampled points (dense O(n^3) factorization).
inline constexpr std::size_t kMaxPoints = 4096;

/// Tensor grid: strictly increasing positive times and a uniformly spaced
/// spatial lattice; points are ordered time-major.
struct GridSpec {
  std::vector<double> t_values;
  std::vector<double> x_values;

  /// Checks ordering, positivity and uniform x spacing (relative 1e-9).
  void validate() const;
  [[nodiscard]] double dx() const;
  [[nodiscard]] std::size_t size() const { return t_values.size() * x_values.size(); }
};

/// Uniform lattice x0 + k dx for k = 0..n-1.
std::vector<double> uniform_lattice(double x0, double dx, std::size_t n);

/// A subset of the lattice points of a GridSpec, in a fixed order.
struct PointSet {
  GridSpec grid;
  std::vector<std::pair<std::size_t, std::size_t>> index;  ///< (time index, x index)

  /// Every point of the grid, time-major.
  static PointSet full(GridSpec grid);

  [[nodiscard]] std::size_t size() const { return index.size(); }
  [[nodiscard]] kernels::SpaceTimePoint point(std::size_t i) const;
  /// Position of (it, ix) in this set; throws PreconditionError if absent.
  [[nodiscard]] std::size_t find(std::size_t it, std::size_t ix) const;
};

struct CovarianceMatrix {
  PointSet points;
  Eigen::MatrixXd entries;
  double jitter_applied = 0.0;  ///< absolute amount added to the diagonal
  std::size_t kernel_evaluations = 0;
};

/// Dense covariance of u over the point set. Entries are taken from a cache
/// keyed by (time index pair, |x index difference|), so the matrix is
/// exactly invariant under translations of the x lattice.
CovarianceMatrix assemble_cov(const PointSet& points, double H, const kernels::KernelConfig& cfg = {});
CovarianceMatrix assemble_cov(const GridSpec& grid, double H, const kernels::KernelConfig& cfg = {});

struct Factor {
  Eigen::MatrixXd lower;  ///< lower-triangular L with L L^T = C + jitter I
  double jitter_applied = 0.0;
  double relative_jitter = 0.0;  ///< jitter_applied / mean(diag C)
};

struct FactorizeOptions {
  double jitter_start = 1e-14;
  double jitter_factor = 10.0;
  std::size_t max_attempts = 9;
  double max_relative_jitter = 1e-6;
};

/// Cholesky factorization with geometric diagonal-jitter escalation.
/// Throws PreconditionError on asymmetric input and FactorizationError when
/// the needed jitter would exceed max_relative_jitter * mean(diag).
Factor factorize_psd(const Eigen::MatrixXd& c, const FactorizeOptions& opt = {});
Factor factorize_psd(CovarianceMatrix& c, const FactorizeOptions& opt = {});

/// n_reps realizations; row r is lower * z_r with z_r drawn from the normal
/// stream (seed, r).
struct SampleBatch {
  Eigen::MatrixXd values;  ///< n_reps x n_points, row-major by replicate
  std::uint64_t seed = 0;
  [[nodiscard]] std::size_t n_reps() const { return static_cast<std::size_t>(values.rows()); }
};

SampleBatch sample(const Factor& factor, std::size_t n_reps, std::uint64_t seed);

enum class Statistic { kSup, kSupAbs, kSupIncrementSpatial, kSupIncrementTemporal };

std::string to_string(Statistic s);

/// Differences u[plus] - u[minus] between points of a PointSet.
struct IncrementMap {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  ///< (plus, minus)
  double step = 0.0;
};

struct SupEstimate {
  double mean;
  double stderr_;
  std::size_t n_reps;
  std::uint64_t seed;
  Statistic statistic;
  bool absolute;
};

/// Mean and standard error across replicates of the per-replicate supremum.
/// kSup / kSupAbs use every point; increment statistics need `increments`.
/// `absolute` switches increments to sup |delta|.
SupEstimate mc_sup(const SampleBatch& batch, Statistic statistic, const IncrementMap* increments = nullptr,
                   bool absolute = false);

struct IncrementGrid {
  GridSpec grid;
  IncrementMap map;  ///< indices into PointSet::full(grid)
};

/// Pairs (x + h, x) for every x whose shifted partner is on the lattice;
/// h must be a nonzero multiple of dx.
IncrementGrid increment_grid_spatial(const GridSpec& grid, double h);

/// Pairs (t + tau, t); missing time levels t + tau are appended.
IncrementGrid increment_grid_temporal(const GridSpec& grid, double tau);

}  // namespace swelab::field
