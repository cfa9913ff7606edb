#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swelab/errors.hpp"
#include "swelab/field.hpp"
#include "swelab/rng.hpp"

namespace swelab::field {
namespace {

TEST(Philox, KnownAnswers) {
  // Reference vectors published with the Random123 library.
  EXPECT_EQ(rng::philox4x32({0, 0, 0, 0}, {0, 0}), (rng::Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(rng::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (rng::Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(rng::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (rng::Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(NormalStream, AddressableAndOpenUnit) {
  rng::NormalStream s(42, 7);
  std::vector<double> buf(11);
  s.fill(buf.data(), buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) EXPECT_EQ(buf[i], s(i));
  EXPECT_NE(rng::NormalStream(42, 8)(0), s(0));
  EXPECT_GT(rng::to_open_unit(0), 0.0);
  EXPECT_LT(rng::to_open_unit(~0ull), 1.0);
}

GridSpec line(double t, std::vector<double> xs) { return {{t}, std::move(xs)}; }

TEST(AssembleCov, SinglePointLightCone) {
  auto c = assemble_cov(line(2.0, {0.0}), 0.5);
  ASSERT_EQ(c.entries.rows(), 1);
  EXPECT_NEAR(c.entries(0, 0), 1.0, 1e-9);
}

TEST(AssembleCov, SymmetricEqualDiagonalAndTranslationInvariant) {
  GridSpec g{{0.5, 1.0}, uniform_lattice(-1.0, 0.25, 9)};
  auto a = assemble_cov(g, 0.3);
  EXPECT_EQ(a.entries, a.entries.transpose());
  EXPECT_EQ(a.entries(0, 0), a.entries(1, 1));
  EXPECT_LE(a.kernel_evaluations, std::size_t{3 * 9});
  GridSpec shifted = g;
  for (double& x : shifted.x_values) x += 5.0;
  auto b = assemble_cov(shifted, 0.3);
  EXPECT_TRUE((a.entries.array() == b.entries.array()).all());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = a.points.point(i).t;
    EXPECT_NEAR(a.entries(i, i), oracle::light_cone_variance(t, 0.3), 1e-10);
  }
}

TEST(AssembleCov, Rejections) {
  EXPECT_THROW(assemble_cov(line(1.0, {0.0, 0.1, 0.3}), 0.3), PreconditionError);
  EXPECT_THROW(assemble_cov(GridSpec{{1.0, 0.5}, {0.0}}, 0.3), PreconditionError);
  EXPECT_THROW(assemble_cov(GridSpec{{1.0}, uniform_lattice(0, 0.01, 4097)}, 0.3), PreconditionError);
}

TEST(Factorize, Identity) {
  auto f = factorize_psd(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_EQ(f.jitter_applied, 0.0);
  EXPECT_TRUE(f.lower.isApprox(Eigen::MatrixXd::Identity(4, 4)));
}

TEST(Factorize, RankDeficientNeedsSmallJitter) {
  Eigen::Matrix2d c;
  c << 1, 1, 1, 1;
  auto f = factorize_psd(c);
  EXPECT_GT(f.jitter_applied, 0.0);
  EXPECT_LE(f.relative_jitter, 1e-6);
  // L L^T = C + jitter I exactly up to round-off.
  Eigen::Matrix2d expect = c;
  expect.diagonal().array() += f.jitter_applied;
  EXPECT_LE((f.lower * f.lower.transpose() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Factorize, Errors) {
  Eigen::Matrix2d asym;
  asym << 1, 0.5, 0.2, 1;
  EXPECT_THROW(factorize_psd(asym), PreconditionError);
  Eigen::Matrix2d indefinite;
  indefinite << 1, 2, 2, 1;
  try {
    factorize_psd(indefinite);
    FAIL();
  } catch (const FactorizationError& e) {
    EXPECT_GT(e.smallest_failing_jitter(), 0.0);
  }
}

TEST(Sample, IdentityFactorMoments) {
  Factor f{Eigen::MatrixXd::Identity(3, 3), 0.0, 0.0};
  auto b = sample(f, 20000, 11);
  const double n = 20000;
  for (int j = 0; j < 3; ++j) {
    const double mean = b.values.col(j).mean();
    const double var = (b.values.col(j).array() - mean).square().sum() / (n - 1);
    EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / n));
  }
  EXPECT_THROW(sample(f, 0, 1), PreconditionError);
}

TEST(Sample, DeterministicAndOrderIndependent) {
  Factor f{Eigen::MatrixXd::Identity(5, 5), 0.0, 0.0};
  f.lower(3, 1) = 0.4;
  auto a = sample(f, 50, 99);
  auto b = sample(f, 50, 99);
  EXPECT_TRUE((a.values.array() == b.values.array()).all());
  // replicate 37 on its own
  Eigen::VectorXd z(5);
  rng::NormalStream(99, 37).fill(z.data(), 5);
  Eigen::VectorXd r = f.lower.triangularView<Eigen::Lower>() * z;
  EXPECT_TRUE((a.values.row(37).transpose().array() == r.array()).all());
  EXPECT_FALSE((sample(f, 50, 100).values.array() == a.values.array()).all());
}

TEST(Sample, EightPointCovarianceWithinFiveStandardErrors) {
  GridSpec g{{0.5, 1.0}, uniform_lattice(0.0, 0.25, 4)};
  auto c = assemble_cov(g, 0.3);
  auto f = factorize_psd(c);
  const std::size_t n = 10000;
  auto b = sample(f, n, 2024);
  const Eigen::MatrixXd centered = b.values.rowwise() - b.values.colwise().mean();
  const Eigen::MatrixXd s = centered.transpose() * centered / double(n - 1);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const double se = std::sqrt((c.entries(i, i) * c.entries(j, j) + c.entries(i, j) * c.entries(i, j)) / n);
      EXPECT_LE(std::abs(s(i, j) - c.entries(i, j)), 5 * se) << i << "," << j;
    }
}

TEST(McSup, SingletonHalfNormal) {
  auto c = assemble_cov(line(2.0, {0.0}), 0.5);
  auto f = factorize_psd(c);
  auto b = sample(f, 40000, 5);
  auto abs_est = mc_sup(b, Statistic::kSupAbs);
  EXPECT_NEAR(abs_est.mean, std::sqrt(2.0 / std::numbers::pi), 3 * abs_est.stderr_);
  auto sup_est = mc_sup(b, Statistic::kSup);
  EXPECT_NEAR(sup_est.mean, 0.0, 3 * sup_est.stderr_);
  EXPECT_LE(sup_est.mean, abs_est.mean);
  EXPECT_EQ(abs_est.n_reps, 40000u);
  EXPECT_EQ(abs_est.seed, 5u);
  EXPECT_THROW(mc_sup(sample(f, 1, 5), Statistic::kSup), PreconditionError);
  EXPECT_THROW(mc_sup(b, Statistic::kSupIncrementSpatial), PreconditionError);
}

TEST(Increments, SpatialPairs) {
  GridSpec g{{1.0}, uniform_lattice(0.0, 0.1, 6)};
  auto a = increment_grid_spatial(g, 0.1);
  ASSERT_EQ(a.map.pairs.size(), 5u);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(a.map.pairs[j], std::make_pair(j + 1, j));
  auto b = increment_grid_spatial(g, 0.3);
  EXPECT_EQ(b.map.pairs.size(), 3u);
  EXPECT_EQ(b.map.pairs.back(), std::make_pair(std::size_t{5}, std::size_t{2}));
  EXPECT_THROW(increment_grid_spatial(g, 0.15), PreconditionError);
  EXPECT_THROW(increment_grid_spatial(g, 0.0), PreconditionError);
}

TEST(Increments, TemporalReuseAndGrowth) {
  GridSpec g{{0.5, 1.0}, uniform_lattice(0.0, 0.1, 3)};
  auto a = increment_grid_temporal(g, 0.5);
  EXPECT_EQ(a.grid.t_values.size(), 3u);  // 1.5 appended, 1.0 reused
  auto b = increment_grid_temporal(GridSpec{{1.0}, {0.0}}, 2.0);
  EXPECT_EQ(b.grid.t_values, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(b.map.pairs.front(), std::make_pair(std::size_t{1}, std::size_t{0}));
  EXPECT_THROW(increment_grid_temporal(g, 0.0), PreconditionError);
}

TEST(Increments, ConsistentWithMetricKernels) {
  const double H = 0.3;
  GridSpec g{{1.0}, uniform_lattice(0.0, 0.25, 4)};
  auto inc = increment_grid_spatial(g, 0.25);
  auto c = assemble_cov(PointSet::full(inc.grid), H);
  // Var(D_h u(x0) - D_h u(x2)) from the matrix vs d2_sq
  Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
  w(inc.map.pairs[0].first) += 1;
  w(inc.map.pairs[0].second) -= 1;
  w(inc.map.pairs[2].first) -= 1;
  w(inc.map.pairs[2].second) += 1;
  EXPECT_NEAR(w.dot(c.entries * w), kernels::d2_sq(1.0, 0.25, 0.0, 0.5, H), 1e-9);

  auto tinc = increment_grid_temporal(GridSpec{{1.0}, uniform_lattice(0.0, 0.5, 2)}, 0.25);
  auto ct = assemble_cov(PointSet::full(tinc.grid), H);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
  v(tinc.map.pairs[0].first) += 1;
  v(tinc.map.pairs[0].second) -= 1;
  v(tinc.map.pairs[1].first) -= 1;
  v(tinc.map.pairs[1].second) += 1;
  EXPECT_NEAR(v.dot(ct.entries * v), kernels::d3_sq(1.0, 0.25, 0.0, 0.5, H), 1e-9);
}

}  // namespace
}  // namespace swelab::field
