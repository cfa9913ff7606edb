#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace swelab::stats {

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
  double slope_stderr;  ///< 0 for exactly collinear data
  std::size_t n;
};

/// Ordinary least squares y = slope * x + intercept. Needs >= 3 points and
/// non-constant x; throws PreconditionError otherwise.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Two-sided Student-t confidence interval for the slope.
std::pair<double, double> slope_ci(const LinearFit& fit, double level = 0.95);

}  // namespace swelab::stats
