#include "swelab/regression.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "swelab/errors.hpp"

namespace swelab::stats {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw PreconditionError("fit_line: size mismatch");
  if (x.size() < 3) throw PreconditionError("fit_line needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit_line: abscissae are all equal");
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  const double rss = std::max(0.0, syy - slope * sxy);
  const double se = std::sqrt(rss / (n - 2.0) / sxx);
  return {slope, my - slope * mx, r2, se, x.size()};
}

std::pair<double, double> slope_ci(const LinearFit& fit, double level) {
  if (!(level > 0.0 && level < 1.0)) throw PreconditionError("confidence level must lie in (0, 1)");
  if (fit.n < 3) throw PreconditionError("slope_ci needs a fit with at least 3 points");
  const boost::math::students_t dist(static_cast<double>(fit.n - 2));
  const double q = boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - level)));
  return {fit.slope - q * fit.slope_stderr, fit.slope + q * fit.slope_stderr};
}

}  // namespace swelab::stats
