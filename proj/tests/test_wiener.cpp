#include <gtest/gtest.h>

#include <random>

#include "eewm/wiener.hpp"
#include "test_util.hpp"

using namespace eewm;
using eewm::testing::expect_error;
using eewm::testing::random_pd;
using eewm::testing::scalar_cov;

TEST(WienerFilter, EqualPower) {
  const auto w = wiener_filter(identity_covariance(3), identity_covariance(3));
  EXPECT_LT((w.matrix() - 0.5 * Matrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(WienerFilter, Scalar) {
  EXPECT_NEAR(wiener_filter(scalar_cov(4), scalar_cov(1))(0, 0), 0.8, 1e-15);
}

TEST(WienerFilter, SolvesNormalEquations) {
  std::mt19937_64 engine(17);
  for (int t = 0; t < 20; ++t) {
    const auto cs = random_pd(3, engine);
    const auto cn = random_pd(3, engine);
    const auto w = wiener_filter(cs, cn);
    EXPECT_LT((w.matrix() * (cs.matrix() + cn.matrix()) - cs.matrix()).norm(), 1e-10);
  }
}

TEST(WienerFilter, EigenvaluesInsideUnitInterval) {
  std::mt19937_64 engine(23);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 5;
    const auto w = wiener_filter(random_pd(n, engine), random_pd(n, engine));
    Eigen::EigenSolver<Matrix> eig(w.matrix());
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(eig.eigenvalues()(i).imag(), 0.0, 1e-10);
      EXPECT_GT(eig.eigenvalues()(i).real(), 0.0);
      EXPECT_LT(eig.eigenvalues()(i).real(), 1.0);
    }
  }
}

TEST(WienerFilter, SingularSumFailsLoudlyUnlessPseudoSolveEnabled) {
  const auto zero = make_covariance(Matrix::Zero(2, 2));
  expect_error(ErrorKind::SingularSum, [&] { wiener_filter(zero, zero); });

  Matrix rank_one = Matrix::Zero(2, 2);
  rank_one(0, 0) = 2.0;
  const auto cs = make_covariance(rank_one);
  expect_error(ErrorKind::SingularSum, [&] { wiener_filter(cs, zero); });
  const auto w = wiener_filter(cs, zero, {.allow_pseudo_solve = true});
  EXPECT_NEAR(w(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(w(1, 1), 0.0, 1e-14);
}

TEST(WienerFilter, DimensionMismatch) {
  expect_error(ErrorKind::DimensionMismatch,
               [] { wiener_filter(identity_covariance(2), identity_covariance(3)); });
}

TEST(ErrorCovariance, Examples) {
  EXPECT_NEAR(error_covariance(FilterMatrix(Matrix::Constant(1, 1, 0.8)), scalar_cov(4))(0, 0), 0.8,
              1e-15);

  const auto cs = make_covariance(eewm::testing::mat2(2, 1, 1, 2));
  const auto noiseless = wiener_filter(cs, make_covariance(Matrix::Zero(2, 2)));
  EXPECT_LT(error_covariance(noiseless, cs).matrix().norm(), 1e-14);

  const auto half = wiener_filter(identity_covariance(2), identity_covariance(2));
  EXPECT_LT((error_covariance(half, identity_covariance(2)).matrix() - 0.5 * Matrix::Identity(2, 2)).norm(),
            1e-15);

  expect_error(ErrorKind::DimensionMismatch, [&] { error_covariance(half, identity_covariance(3)); });
}

TEST(Estimate, AppliesFilter) {
  const Vector x = Vector::LinSpaced(4, -1.0, 2.0);
  EXPECT_EQ(estimate(FilterMatrix(Matrix::Identity(4, 4)), x), x);
  Vector obs(2);
  obs << 2, 4;
  const Vector out = estimate(FilterMatrix(0.5 * Matrix::Identity(2, 2)), obs);
  EXPECT_EQ(out(0), 1.0);
  EXPECT_EQ(out(1), 2.0);
  expect_error(ErrorKind::DimensionMismatch,
               [&] { estimate(FilterMatrix(Matrix::Identity(3, 3)), obs); });
}

TEST(Estimate, MonteCarloMatchesErrorCovariance) {
  const int n = 2;
  const auto cs = identity_covariance(n);
  const auto cn = identity_covariance(n);
  const auto w = wiener_filter(cs, cn);
  const double analytic = error_covariance(w, cs).trace() / n;
  EXPECT_NEAR(analytic, 0.5, 1e-15);

  const int m = 100000;
  const auto s = sample_ensemble(cs, m, substream_seed(5, 0));
  const auto noise = sample_ensemble(cn, m, substream_seed(5, 1));
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    const Vector obs = (s.data.row(k) + noise.data.row(k)).transpose();
    total += (estimate(w, obs) - s.data.row(k).transpose()).squaredNorm() / n;
  }
  EXPECT_NEAR(total / m, analytic, 0.02 * analytic);
}

TEST(EstimationMse, WienerIsLocallyOptimal) {
  std::mt19937_64 engine(31);
  for (int inst = 0; inst < 5; ++inst) {
    const int n = 2 + inst;
    const auto cs = random_pd(n, engine);
    const auto cn = random_pd(n, engine);
    const auto w = wiener_filter(cs, cn);
    const double best = estimation_mse(w, cs, cn);
    EXPECT_NEAR(error_covariance(w, cs).trace(), n * best, 1e-12);
    for (int k = 0; k < 100; ++k) {
      Matrix delta = eewm::testing::gaussian_matrix(n, n, engine);
      delta /= delta.norm();
      const FilterMatrix perturbed(w.matrix() + 1e-2 * delta);
      EXPECT_GE(estimation_mse(perturbed, cs, cn), best);
    }
  }
}
