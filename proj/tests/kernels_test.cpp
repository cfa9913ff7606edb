#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swelab/errors.hpp"
#include "swelab/kernels.hpp"

namespace swelab::kernels {
namespace {

using P = SpaceTimePoint;

double four_point_spatial(double t, double h, double x, double y, double H) {
  // E|u(t,x+h) - u(t,x) - u(t,y+h) + u(t,y)|^2 from ten covariances.
  const std::vector<std::pair<double, double>> pts = {{x + h, 1}, {x, -1}, {y + h, -1}, {y, 1}};
  double sum = 0.0;
  for (auto [a, ca] : pts)
    for (auto [b, cb] : pts) sum += ca * cb * cov({t, a}, {t, b}, H);
  return sum;
}

double four_point_temporal(double t, double tau, double x, double y, double H) {
  const std::vector<std::pair<P, double>> pts = {{{t + tau, x}, 1}, {{t, x}, -1}, {{t + tau, y}, -1}, {{t, y}, 1}};
  double sum = 0.0;
  for (auto [a, ca] : pts)
    for (auto [b, cb] : pts) sum += ca * cb * cov(a, b, H);
  return sum;
}

TEST(TimeOverlap, Examples) {
  const double ref = oracle::romberg([](double r) { return std::sin(2.0 - r) * std::sin(1.0 - r); }, 0.0, 1.0);
  EXPECT_NEAR(time_overlap_integral(2.0, 1.0, 1.0), ref, 1e-14);
  EXPECT_NEAR(ref, 0.44524, 1e-5);
  EXPECT_EQ(time_overlap_integral(2.0, 0.0, 1.0), 0.0);
  for (double xi : {1e-6, 1e-3, 0.3, 5.0}) {
    const double s = 0.7;
    EXPECT_NEAR(time_overlap_integral(s, s, xi), s / 2 - std::sin(2 * xi * s) / (4 * xi), 1e-15);
  }
}

TEST(TimeOverlap, SeriesBranchContinuous) {
  const double t = 1.5, s = 0.5;
  const double cut = 1e-3 / (t + s);
  const double lo = cut * (1 - 1e-9), hi = cut * (1 + 1e-9);
  const double below = time_overlap_integral(t, s, lo) / (lo * lo);
  const double above = time_overlap_integral(t, s, hi) / (hi * hi);
  EXPECT_NEAR(below / above, 1.0, 1e-9);
  EXPECT_GT(time_overlap_integral(t, s, 1e-12), 0.0);
}

TEST(TimeOverlap, DistinctErrors) {
  EXPECT_THROW(time_overlap_integral(NAN, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(time_overlap_integral(1.0, 2.0, 1.0), PreconditionError);
  EXPECT_THROW(time_overlap_integral(1.0, 0.5, 0.0), PreconditionError);
}

TEST(Variance, LightConeClosedForm) {
  EXPECT_EQ(variance(0.0, 0.3), 0.0);
  EXPECT_NEAR(variance(2.0, 0.5), 1.0, 1e-9);
  for (double H : {0.05, 0.2, 0.3, 0.5, 0.7, 0.95})
    for (double t : {0.01, 0.25, 1.0, 3.0, 40.0})
      EXPECT_NEAR(variance(t, H) / oracle::light_cone_variance(t, H), 1.0, 1e-9) << H << " " << t;
}

TEST(Variance, GoldenConstant) {
  // kappa_0.3 = variance(1, 0.3), frozen from the physical-space closed form.
  const double H = 0.3;
  const double golden = 0.2368307135172497;  // 2^(2H-2)/(2H+1)
  EXPECT_NEAR(variance(1.0, H), golden, 1e-9);
  EXPECT_NEAR(oracle::light_cone_variance(1.0, H), golden, 1e-15);
}

TEST(Variance, Scaling) {
  for (double H : {0.2, 0.3, 0.5, 0.7}) {
    const double v1 = variance(1.3, H);
    for (double lambda : {2.0, 4.0}) {
      EXPECT_NEAR(variance(lambda * 1.3, H) / v1, std::pow(lambda, 2 * H + 1), 1e-9 * std::pow(lambda, 2 * H + 1));
    }
  }
}

TEST(Cov, LightConeOracleOnPointSet) {
  const std::vector<double> times = {0.25, 0.5, 1.0, 2.0, 3.5};
  const std::vector<double> xs = {-1.0, 0.0, 0.3, 1.7, 4.0};
  for (double H : {0.5, 0.3, 0.8})
    for (double t1 : times)
      for (double t2 : times)
        for (double x : xs) {
          const double ref = oracle::light_cone_cov(t1, 0.0, t2, x, H);
          const double got = cov({t1, 0.0}, {t2, x}, H);
          EXPECT_NEAR(got, ref, 1e-9 * std::max(1.0, std::abs(ref))) << H << " " << t1 << " " << t2 << " " << x;
        }
}

TEST(Cov, Examples) {
  EXPECT_NEAR(cov({1, 0}, {1, 1}, 0.5), 1.0 / 16.0, 1e-10);
  EXPECT_EQ(cov({2, 0}, {0, 3}, 0.3), 0.0);
  EXPECT_NEAR(cov({1.5, 2}, {1.5, 2}, 0.3), variance(1.5, 0.3), 1e-12);
}

TEST(Cov, SymmetryStationarityCauchySchwarz) {
  const P p{1.2, 0.4}, q{0.7, -2.1};
  EXPECT_EQ(cov(p, q, 0.3), cov(q, p, 0.3));
  EXPECT_NEAR(cov({1.2, 10.4}, {0.7, 7.9}, 0.3), cov(p, q, 0.3), 1e-9);
  EXPECT_LE(std::abs(cov(p, q, 0.3)), std::sqrt(variance(1.2, 0.3) * variance(0.7, 0.3)) + 1e-10);
}

TEST(Cov, FarApartDecorrelates) {
  // Disjoint light cones: only the long-range spatial correlation of the noise remains, O(D^(2H-2)).
  const double far = cov({1, 0}, {1, 1000}, 0.3);
  EXPECT_NEAR(far, oracle::light_cone_cov(1, 0, 1, 1000, 0.3), 1e-12);
  EXPECT_LT(std::abs(far), 2e-5 * variance(1.0, 0.3));
  EXPECT_NEAR(cov({1, 0}, {1, 1000}, 0.5), 0.0, 1e-12);
  EXPECT_NEAR(d1({1, 0}, {1, 1000}, 0.3), std::sqrt(2 * variance(1.0, 0.3)), 1e-5);
}

TEST(D1, Examples) {
  EXPECT_EQ(d1({1, 0}, {1, 0}, 0.3), 0.0);
  EXPECT_NEAR(d1({1, 0}, {1, 1}, 0.5), std::sqrt(3.0 / 8.0), 1e-9);
  auto m = d1_detailed({1, 0}, {1, 1e-9}, 0.3);
  EXPECT_FALSE(m.roundoff_flag);
  EXPECT_GE(m.value, 0.0);
}

TEST(D2, ZeroCasesAndFourPointOracle) {
  EXPECT_EQ(d2_sq(1, 0, 0, 0.5, 0.3), 0.0);
  EXPECT_EQ(d2_sq(1, 0.25, 0.5, 0.5, 0.3), 0.0);
  EXPECT_THROW(d2_sq(0, 0.25, 0, 0.5, 0.3), PreconditionError);
  for (double H : {0.3, 0.5, 0.7}) {
    const double got = d2_sq(1, 0.25, 0, 0.5, H);
    const double ref = four_point_spatial(1, 0.25, 0, 0.5, H);
    EXPECT_NEAR(got, ref, 1e-8 * std::max(1.0, ref)) << H;
    EXPECT_GT(got, 0.0);
  }
}

TEST(D3, ZeroCasesAndFourPointOracle) {
  EXPECT_EQ(d3_sq(1, 0.25, 0.5, 0.5, 0.3), 0.0);
  EXPECT_THROW(d3_sq(1, 0.0, 0, 0.5, 0.3), PreconditionError);
  for (double H : {0.3, 0.5, 0.7}) {
    const double got = d3_sq(1, 0.25, 0, 0.5, H);
    const double ref = four_point_temporal(1, 0.25, 0, 0.5, H);
    EXPECT_NEAR(got, ref, 1e-8 * std::max(1.0, ref)) << H;
  }
}

TEST(D3, WeightNonNegativeOnLogGrid) {
  for (int k = 0; k <= 600; ++k) {
    const double xi = std::pow(10.0, -3.0 + 6.0 * k / 600.0);
    EXPECT_GE(temporal_increment_weight(1.0, 0.25, xi), 0.0) << xi;
  }
}

TEST(Config, DampingSwitchConvergesToUndamped) {
  KernelConfig damped;
  damped.damping_eps = 1e-6;
  damped.rel_tol = 1e-9;
  const double a = variance(1.0, 0.3, damped);
  EXPECT_LT(a, variance(1.0, 0.3));
  EXPECT_NEAR(a, variance(1.0, 0.3), 1e-2);
  KernelConfig bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(variance(1.0, 0.3, bad), PreconditionError);
}

}  // namespace
}  // namespace swelab::kernels
