#include <gtest/gtest.h>

#include <random>

#include "eewm/attack.hpp"
#include "test_util.hpp"

using namespace eewm;
using eewm::testing::expect_error;
using eewm::testing::random_pd;
using eewm::testing::scalar_cov;

namespace {

CovarianceMatrix zeros(int n) { return make_covariance(Matrix::Zero(n, n)); }

double trace_product(const Matrix& a, const Matrix& b) { return (a * b).trace(); }

}  // namespace

TEST(WatermarkWiener, Examples) {
  const auto h = watermark_wiener(identity_covariance(3), identity_covariance(3));
  EXPECT_LT((h.matrix() - 0.5 * Matrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_NEAR(watermark_wiener(scalar_cov(3), scalar_cov(1))(0, 0), 0.25, 1e-15);
}

TEST(WatermarkWiener, EigenvaluesInsideUnitInterval) {
  std::mt19937_64 engine(41);
  for (int t = 0; t < 10; ++t) {
    const auto h = watermark_wiener(random_pd(4, engine), random_pd(4, engine));
    Eigen::EigenSolver<Matrix> eig(h.matrix());
    for (int i = 0; i < 4; ++i) {
      EXPECT_GT(eig.eigenvalues()(i).real(), 0.0);
      EXPECT_LT(eig.eigenvalues()(i).real(), 1.0);
    }
  }
}

TEST(AttackMatrix, Examples) {
  const FilterMatrix half(0.5 * Matrix::Identity(2, 2));
  EXPECT_EQ(attack_matrix(half, 0.0).matrix(), Matrix::Identity(2, 2));
  EXPECT_EQ(attack_matrix(half, 1.0).matrix(), 0.5 * Matrix::Identity(2, 2));
  EXPECT_EQ(attack_matrix(FilterMatrix(Matrix::Constant(1, 1, 0.5)), 2.0)(0, 0), 0.0);
}

TEST(AttackDistortion, Endpoints) {
  std::mt19937_64 engine(43);
  const auto cx = random_pd(4, engine);
  const auto cw = random_pd(4, engine);
  const FilterMatrix keep(Matrix::Identity(4, 4));
  const FilterMatrix erase(Matrix::Zero(4, 4));
  EXPECT_NEAR(attack_distortion(keep, cx, cw, zeros(4)), average_power(cw), 1e-14);
  EXPECT_NEAR(attack_distortion(erase, cx, cw, zeros(4)), average_power(cx), 1e-14);
  expect_error(ErrorKind::DimensionMismatch,
               [&] { attack_distortion(keep, cx, cw, zeros(3)); });
}

TEST(AttackDistortion, ScalarRemovalMatchesMonteCarlo) {
  const FilterMatrix g(Matrix::Constant(1, 1, 0.5));
  const auto one = scalar_cov(1);
  EXPECT_NEAR(attack_distortion(g, one, one, zeros(1)), 0.5, 1e-15);

  const int m = 1000000;
  const auto x = sample_ensemble(one, m, substream_seed(8, 0));
  const auto w = sample_ensemble(one, m, substream_seed(8, 1));
  const SampleBatch y{.data = x.data + w.data};
  const auto attacked = apply_attack(g, y);
  const double mc = (attacked.data - x.data).squaredNorm() / m;
  EXPECT_NEAR(mc, 0.5, 0.01 * 0.5);
  const double r_mc = attacked.data.cwiseProduct(w.data).sum() / m;
  EXPECT_NEAR(r_mc, average_correlation(g, one), 0.01);
}

TEST(AverageCorrelation, Examples) {
  std::mt19937_64 engine(47);
  const auto cw = random_pd(3, engine);
  EXPECT_NEAR(average_correlation(FilterMatrix(Matrix::Identity(3, 3)), cw), average_power(cw), 1e-15);
  EXPECT_EQ(average_correlation(FilterMatrix(Matrix::Zero(3, 3)), cw), 0.0);
  EXPECT_NEAR(average_correlation(FilterMatrix(Matrix::Constant(1, 1, 0.5)), scalar_cov(1)), 0.5, 1e-15);
  expect_error(ErrorKind::DimensionMismatch,
               [&] { average_correlation(FilterMatrix(Matrix::Identity(2, 2)), cw); });
}

TEST(SolveAttack, NoAttackEndpoint) {
  std::mt19937_64 engine(53);
  const auto cx = random_pd(3, engine);
  const auto cw = random_pd(3, engine);
  const auto sol = solve_attack(cx, cw, average_power(cw));
  EXPECT_NEAR(sol.gamma, 0.0, 1e-14);
  EXPECT_LT((sol.g.matrix() - Matrix::Identity(3, 3)).norm(), 1e-14);
  EXPECT_NEAR(sol.distortion, average_power(cw), 1e-14);
}

TEST(SolveAttack, RemovalPoint) {
  std::mt19937_64 engine(59);
  const auto cx = random_pd(3, engine);
  const auto cw = random_pd(3, engine);
  const auto h = watermark_wiener(cx, cw);
  const double r0 = average_power(cw) - trace_product(h.matrix(), cw.matrix()) / 3;
  const auto sol = solve_attack(cx, cw, r0);
  EXPECT_NEAR(sol.gamma, 1.0, 1e-12);
  EXPECT_NEAR(sol.lagrange, 0.0, 1e-12);
}

TEST(SolveAttack, ScalarFullErasure) {
  const auto one = scalar_cov(1);
  const auto sol = solve_attack(one, one, 0.0);
  EXPECT_NEAR(sol.gamma, 2.0, 1e-15);
  EXPECT_NEAR(sol.g(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(sol.distortion, 1.0, 1e-15);
  // direct substitution
  EXPECT_NEAR(average_correlation(sol.g, one), 0.0, 1e-15);
  const double g = sol.g(0, 0);
  EXPECT_NEAR(g * g + g * g - 2 * g + 1, sol.distortion, 1e-15);
}

TEST(SolveAttack, DegenerateWatermark) {
  expect_error(ErrorKind::DegenerateWatermark,
               [] { solve_attack(identity_covariance(2), zeros(2), 0.0); });
}

TEST(SolveAttack, GammaIsUnrestricted) {
  const auto cx = identity_covariance(2);
  const auto cw = identity_covariance(2, 0.5);
  EXPECT_LT(solve_attack(cx, cw, 0.8).gamma, 0.0);
  EXPECT_GT(solve_attack(cx, cw, -0.5).gamma, 2.0);
}

TEST(SolveAttack, InvariantsOnRandomInstances) {
  std::mt19937_64 engine(61);
  std::uniform_real_distribution<double> frac(-0.5, 1.2);
  for (int t = 0; t < 30; ++t) {
    const int n = 1 + t % 6;
    const auto cx = random_pd(n, engine);
    const auto cw = random_pd(n, engine);
    const double r0 = frac(engine) * average_power(cw);
    const auto sol = solve_attack(cx, cw, r0);
    const auto h = watermark_wiener(cx, cw);
    EXPECT_LT((sol.g.matrix() - (Matrix::Identity(n, n) - sol.gamma * h.matrix())).cwiseAbs().maxCoeff(),
              1e-10);
    EXPECT_NEAR(sol.correlation_achieved, r0, 1e-10);
    EXPECT_NEAR(average_correlation(sol.g, cw), r0, 1e-10);
    EXPECT_NEAR(sol.gamma, 1.0 + sol.lagrange / 2.0, 1e-14);
  }
}

TEST(SolveAttack, ConstraintPreservingPerturbationsNeverHelp) {
  std::mt19937_64 engine(67);
  for (int t = 0; t < 8; ++t) {
    const int n = 2 + t % 4;
    const auto cx = random_pd(n, engine);
    const auto cw = random_pd(n, engine);
    const auto sol = solve_attack(cx, cw, 0.3 * average_power(cw));
    for (int k = 0; k < 100; ++k) {
      Matrix delta = eewm::testing::gaussian_matrix(n, n, engine);
      // tr(delta C_w) = <delta, C_w>_F since C_w is symmetric
      delta -= (delta.cwiseProduct(cw.matrix()).sum() / cw.matrix().squaredNorm()) * cw.matrix();
      delta /= delta.norm();
      const FilterMatrix g(sol.g.matrix() + 1e-3 * delta);
      EXPECT_NEAR(average_correlation(g, cw), sol.r_target, 1e-12);
      EXPECT_GE(attack_distortion(g, cx, cw, zeros(n)), sol.distortion);
    }
  }
}

TEST(SolveAttack, AddedNoiseOnlyCosts) {
  std::mt19937_64 engine(71);
  for (int t = 0; t < 10; ++t) {
    const int n = 1 + t % 5;
    const auto cx = random_pd(n, engine);
    const auto cw = random_pd(n, engine);
    const auto sol = solve_attack(cx, cw, 0.4 * average_power(cw));
    double previous = sol.distortion;
    for (double level : {1e-3, 1e-2, 1e-1, 1.0}) {
      const double d = attack_distortion(sol.g, cx, cw, identity_covariance(n, level));
      EXPECT_GT(d, previous);
      EXPECT_NEAR(d - sol.distortion, level, 1e-12);
      previous = d;
    }
    // r does not see C_v at all: the formula has no noise term
    EXPECT_NEAR(average_correlation(sol.g, cw), sol.r_target, 1e-12);
  }
}

TEST(SolveAttack, DistortionIsSmallestAtRemovalPoint) {
  // D(gamma) = P_w + (gamma^2 - 2 gamma) tr(H C_w) / N, so D falls from P_w
  // at r0 = P_w to its minimum at gamma = 1 and rises again below that.
  std::mt19937_64 engine(73);
  const auto cx = toeplitz_from_autocorr(ar1_autocorr(1.0, 0.9, 8));
  const auto cw = random_pd(8, engine).scaled(0.1);
  const auto h = watermark_wiener(cx, cw);
  const double pw = average_power(cw);
  const double removal_r0 = pw - trace_product(h.matrix(), cw.matrix()) / 8;
  double last = -1.0;
  for (int i = 0; i <= 20; ++i) {
    const double r0 = removal_r0 * (1.0 - i / 20.0);
    const double d = solve_attack(cx, cw, r0).distortion;
    EXPECT_GE(d, last - 1e-15);
    last = d;
  }
  double prev = solve_attack(cx, cw, pw).distortion;
  for (int i = 1; i <= 20; ++i) {
    const double r0 = pw + (removal_r0 - pw) * i / 20.0;
    const double d = solve_attack(cx, cw, r0).distortion;
    EXPECT_LE(d, prev + 1e-15);
    prev = d;
  }
}

TEST(ApplyAttack, Basics) {
  const auto batch = sample_ensemble(identity_covariance(3), 50, 2);
  EXPECT_EQ(apply_attack(FilterMatrix(Matrix::Identity(3, 3)), batch).data, batch.data);
  EXPECT_EQ(apply_attack(FilterMatrix(Matrix::Zero(3, 3)), batch).data, Matrix::Zero(50, 3));
  expect_error(ErrorKind::DimensionMismatch,
               [&] { apply_attack(FilterMatrix(Matrix::Identity(2, 2)), batch); });
}

TEST(ApplyAttack, RemovalCorrelationMatchesAnalytic) {
  const int n = 6;
  const int m = 100000;
  const auto cx = toeplitz_from_autocorr(ar1_autocorr(1.0, 0.7, n));
  const auto cw = identity_covariance(n, 0.2);
  const auto g = attack_matrix(watermark_wiener(cx, cw), 1.0);
  const auto x = sample_ensemble(cx, m, substream_seed(12, 0));
  const auto w = sample_ensemble(cw, m, substream_seed(12, 1));
  const auto attacked = apply_attack(g, SampleBatch{.data = x.data + w.data});
  const Vector per_sample = attacked.data.cwiseProduct(w.data).rowwise().sum() / n;
  const double mean = per_sample.mean();
  const double se = std::sqrt((per_sample.array() - mean).square().sum() / (m - 1) / m);
  EXPECT_LT(std::abs(mean - average_correlation(g, cw)), 3 * se);
}
