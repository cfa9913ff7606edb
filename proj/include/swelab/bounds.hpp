#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "swelab/field.hpp"
#include "swelab/kernels.hpp"
#include "swelab/regression.hpp"

namespace swelab::bounds {

/// Seed used by every experiment unless the caller supplies one.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// 1 + sqrt(log2(L/T)) for L >= T, else 1.
double phi0(double T, double L);

/// T^(1/2 + H) * phi0(T, L): the growth envelope of E[sup u] on [0,T]x[-L,L].
double phi(double T, double L, double H);

/// Closed-form metric equivalent to d1 (t = p.t, s = q.t):
///   (s ^ t)^(1/2) [|x - y|^H ^ (s ^ t)^H] + (s v t)^(1/2) |t - s|^H
double D1H(kernels::SpaceTimePoint p, kernels::SpaceTimePoint q, double H);

struct RatioLocation {
  double t;
  double s;
  double dx;
};

struct RatioScanResult {
  std::size_t n_t = 0;
  std::size_t n_s = 0;
  std::size_t n_dx = 0;
  std::size_t evaluated = 0;
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  RatioLocation argmin{};
  RatioLocation argmax{};
  std::size_t degenerate_skipped = 0;  ///< pairs with D1H = 0
  std::size_t roundoff_flags = 0;      ///< d1 radicands that were clamped
};

/// d1 / D1H for p = (t, 0), q = (s, dx) over t_set x s_set x dx_set.
/// Degenerate pairs are counted and skipped; throws PreconditionError if
/// nothing is left to evaluate.
RatioScanResult metric_ratio_scan(const std::vector<double>& t_set, const std::vector<double>& s_set,
                                  const std::vector<double>& dx_set, double H,
                                  const kernels::KernelConfig& cfg = {});

/// Inserts the geometric (or arithmetic) midpoint between neighbours of a
/// sorted set: one step of 2x refinement.
std::vector<double> refine_geometric(const std::vector<double>& v);
std::vector<double> refine_arithmetic(const std::vector<double>& v);

/// Sup-experiment resolution: spatial step <= t_min / x_per_tmin and at
/// least `time_levels` uniformly spaced levels in (0, T].
struct GridRule {
  std::size_t x_per_tmin = 16;
  std::size_t time_levels = 8;
  [[nodiscard]] std::string describe() const;
};

using Coordinates = std::vector<std::pair<std::string, double>>;

struct CellEstimate {
  Coordinates coords;        ///< e.g. {{"T", 1}, {"L", 4}}
  field::SupEstimate sup;    ///< signed supremum
  field::SupEstimate sup_abs;
  std::size_t n_points;
  double relative_jitter;
};

struct FitSummary {
  std::string name;
  std::string x_label;
  std::string y_label;
  stats::LinearFit fit;
  double ci_lo;
  double ci_hi;
  double slope_lo;  ///< accepted slope range (infinite when unconstrained)
  double slope_hi;
  double r2_min;
  bool pass;
};

struct Check {
  std::string name;
  double value;
  double lo;
  double hi;
  bool pass;
};

/// Observer for raw sampled fields, called once per cell (dump/debug use).
using BatchSink = std::function<void(std::size_t cell, const Coordinates& coords, const field::PointSet& points,
                                     const field::SampleBatch& batch)>;

struct ExperimentReport {
  std::string id;
  Coordinates params;
  std::uint64_t seed = 0;
  std::size_t n_reps = 0;
  std::string grid_rule;
  std::vector<CellEstimate> estimates;
  std::vector<FitSummary> fits;
  std::vector<Check> checks;
  bool pass = false;
  double runtime_seconds = 0.0;
};

struct GrowthConfig {
  double H = 0.3;
  std::vector<double> T_list{0.5, 1.0, 2.0, 4.0};  ///< T-scan, L = T
  double lscan_T = 1.0;
  std::vector<double> L_list{1.0, 4.0, 16.0, 64.0};  ///< L-scan at T = lscan_T
  GridRule rule{};
  std::size_t n_reps = 400;
  std::uint64_t seed = kDefaultSeed;
  double slope_tol = 0.1;
  double r2_min = 0.9;
  kernels::KernelConfig kernel{};
  BatchSink sink{};
};

/// E[sup u] growth in T (at L = T) and in L (at fixed T).
///
/// T-scan cells use the full space-time grid of the rule. L-scan cells
/// sample the single time row t = T with step T / x_per_tmin: the full
/// space-time grid would exceed the dense point cap for large L.
ExperimentReport sup_growth_experiment(const GrowthConfig& cfg);

struct HolderSpaceConfig {
  double H = 0.3;
  double t = 1.0;
  double L = 4.0;
  std::vector<double> h_list{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  double h_max_fraction = 0.25;  ///< every h <= h_max_fraction * min(t, 1)
  GridRule rule{};
  std::size_t n_reps = 1000;
  std::uint64_t seed = kDefaultSeed;
  double slope_tol = 0.1;
  kernels::KernelConfig kernel{};
  BatchSink sink{};
};

/// E[sup_x (u(t, x + h) - u(t, x))] over x on the rule's lattice in [-L, L],
/// one independent cell per h.
ExperimentReport holder_space_experiment(const HolderSpaceConfig& cfg);

struct HolderTimeConfig {
  double H = 0.3;
  std::vector<double> t_values{1.0, 2.0};  ///< slope fit at the first; ratio check against the second
  double L = 2.0;
  std::vector<double> tau_list{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  double tau_max_fraction = 0.25;
  GridRule rule{};
  std::size_t n_reps = 1000;
  std::uint64_t seed = kDefaultSeed;
  double slope_tol = 0.1;
  double ratio_tol = 0.15;
  kernels::KernelConfig kernel{};
  BatchSink sink{};
};

/// E[sup_x (u(t + tau, x) - u(t, x))] over x in [-L, L], one independent
/// cell per (t, tau). Every t uses the same spatial lattice, with step
/// min(t_values) / x_per_tmin.
ExperimentReport holder_time_experiment(const HolderTimeConfig& cfg);

}  // namespace swelab::bounds
