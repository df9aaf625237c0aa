#include "eewm/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "eewm/attack.hpp"

namespace eewm {

namespace {

double trace_of_product(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

// Residual energy straight from dense matrices; callers guarantee symmetry
// and PSD.
double residual_energy_raw(const Matrix& host, const Matrix& watermark) {
  const Matrix x = detail::solve_symmetric(host + watermark, watermark);
  const double e = (watermark.trace() - trace_of_product(watermark, x)) / host.rows();
  return std::max(e, 0.0);
}

}  // namespace

CovarianceMatrix estimated_watermark_covariance(const CovarianceMatrix& host,
                                                const CovarianceMatrix& watermark) {
  const Matrix h = watermark_wiener(host, watermark).matrix();
  return make_covariance(h * host.matrix() * h.transpose() +
                         h * watermark.matrix() * h.transpose());
}

double residual_energy(const CovarianceMatrix& host, const CovarianceMatrix& watermark) {
  detail::require_same_dim(host.dim(), watermark.dim(), "residual_energy");
  return residual_energy_raw(host.matrix(), watermark.matrix());
}

double residual_energy_gamma(const CovarianceMatrix& host, const CovarianceMatrix& watermark,
                             double gamma) {
  detail::require_same_dim(host.dim(), watermark.dim(), "residual_energy_gamma");
  const Matrix h = watermark_wiener(host, watermark).matrix();
  const double t = trace_of_product(h, watermark.matrix());
  const double what = (h * (host.matrix() + watermark.matrix()) * h.transpose()).trace();
  return (watermark.trace() - 2.0 * gamma * t + gamma * gamma * what) / host.dim();
}

DesignSolution optimal_watermark_covariance(const CovarianceMatrix& host, double p_w) {
  if (!(p_w > 0.0) || !std::isfinite(p_w)) {
    throw Error(ErrorKind::InvalidParam, "watermark power must be positive");
  }
  const double p_x = average_power(host);
  if (!(p_x > 0.0)) throw Error(ErrorKind::InvalidParam, "host power must be positive");
  const double c = p_w / p_x;
  CovarianceMatrix c_w = host.scaled(c);
  const double energy = residual_energy(host, c_w);
  return DesignSolution{.c_w_opt = std::move(c_w),
                        .c = c,
                        .p_w = p_w,
                        .p_x = p_x,
                        .lagrange = -1.0 / ((1.0 + c) * (1.0 + c)),
                        .residual_energy = energy,
                        .alpha = c / (1.0 + c)};
}

StationaryBranches stationary_branches(double lagrange) {
  if (!(lagrange < 0.0)) throw Error(ErrorKind::InvalidParam, "designer multiplier must be negative");
  const double s = std::sqrt(-lagrange);
  return {.retained = (1.0 - s) / s, .rejected = (1.0 + s) / -s};
}

double stationarity_residual(const CovarianceMatrix& host, const CovarianceMatrix& watermark,
                             double lagrange) {
  detail::require_same_dim(host.dim(), watermark.dim(), "stationarity_residual");
  const auto n = host.dim();
  // a = S^-1 C_w, so C_w S^-1 = a^T and S^-1 C_w^2 S^-1 = a a^T
  const Matrix a = detail::solve_symmetric(host.matrix() + watermark.matrix(), watermark.matrix());
  const Matrix lhs =
      (1.0 + lagrange) * Matrix::Identity(n, n) + a * a.transpose() - a.transpose() - a;
  return lhs.norm() / n;
}

double tangent_gradient_check(const CovarianceMatrix& host, const CovarianceMatrix& watermark,
                              int n_directions, double step, std::uint64_t seed) {
  detail::require_same_dim(host.dim(), watermark.dim(), "tangent_gradient_check");
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidParam, "step must be positive");
  if (n_directions < 1) throw Error(ErrorKind::InvalidParam, "need at least one direction");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(watermark.matrix());
  // Directions live in the span of eigenvectors whose eigenvalue exceeds the
  // step; a unit-Frobenius perturbation there cannot leave the PSD cone.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) > step) keep.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  if (k < 2) return 0.0;  // the trace-free feasible set is a single point
  Matrix basis(host.dim(), k);
  for (Eigen::Index j = 0; j < k; ++j) basis.col(j) = eig.eigenvectors().col(keep[j]);

  double worst = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int d = 0; d < n_directions; ++d) {
    std::mt19937_64 engine(substream_seed(seed, static_cast<std::uint64_t>(d)));
    Matrix b(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) b(i, j) = normal(engine);
    }
    b = 0.5 * (b + b.transpose()).eval();
    b.diagonal().array() -= b.trace() / static_cast<double>(k);
    b /= b.norm();
    const Matrix delta = basis * b * basis.transpose();
    const double up = residual_energy_raw(host.matrix(), watermark.matrix() + step * delta);
    const double down = residual_energy_raw(host.matrix(), watermark.matrix() - step * delta);
    worst = std::max(worst, std::abs(up - down) / (2.0 * step));
  }
  return worst;
}

double tangent_gradient_check(const CovarianceMatrix& host, double p_w, int n_directions,
                              double step, std::uint64_t seed) {
  const auto opt = optimal_watermark_covariance(host, p_w);
  return tangent_gradient_check(host, opt.c_w_opt, n_directions, step, seed);
}

// ---------------------------------------------------------------------------

namespace {

Matrix candidate_covariance(const Matrix& host, double p_w, int trial, std::uint64_t seed) {
  const auto n = host.rows();
  std::mt19937_64 engine(substream_seed(seed, static_cast<std::uint64_t>(trial)));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = normal(engine);
    }
    return a;
  };

  Matrix c;
  switch (trial % 5) {
    case 0:
    case 1: {
      const Matrix a = gaussian(n, n);
      c = a * a.transpose();
      break;
    }
    case 2: {
      const auto width = n > 1 ? 1 + static_cast<Eigen::Index>(engine() % static_cast<std::uint64_t>(n - 1)) : 1;
      const Matrix a = gaussian(n, width);
      c = a * a.transpose();
      break;
    }
    case 3: {
      const Matrix z = gaussian(n, 1);
      c = z.col(0).cwiseAbs2().asDiagonal();
      break;
    }
    default: {
      // host-aligned point pushed off by a symmetric perturbation of random size
      std::uniform_real_distribution<double> exponent(-6.0, -1.0);
      const double size = p_w * std::pow(10.0, exponent(engine));
      Matrix b = gaussian(n, n);
      b = 0.5 * (b + b.transpose()).eval();
      b /= b.norm();
      Matrix aligned = host * (p_w * n / host.trace()) + size * b;
      Eigen::SelfAdjointEigenSolver<Matrix> eig(aligned);
      c = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() *
          eig.eigenvectors().transpose();
      c = 0.5 * (c + c.transpose()).eval();
      break;
    }
  }
  const double tr = c.trace();
  if (!(tr > 0.0)) return Matrix();
  return c * (p_w * static_cast<double>(n) / tr);
}

struct Best {
  double energy = -std::numeric_limits<double>::infinity();
  int trial = -1;
};

}  // namespace

BruteForceResult brute_force_best_covariance(const CovarianceMatrix& host, double p_w, int trials,
                                             std::uint64_t seed, int threads) {
  if (trials < 1) throw Error(ErrorKind::InvalidParam, "need at least one trial");
  if (!(p_w > 0.0)) throw Error(ErrorKind::InvalidParam, "watermark power must be positive");
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, trials);

  const Matrix& hx = host.matrix();
  std::vector<Best> partial(static_cast<std::size_t>(threads));
  auto work = [&](int worker) {
    const int begin = static_cast<int>(static_cast<long long>(trials) * worker / threads);
    const int end = static_cast<int>(static_cast<long long>(trials) * (worker + 1) / threads);
    Best best;
    for (int t = begin; t < end; ++t) {
      const Matrix c = candidate_covariance(hx, p_w, t, seed);
      if (c.size() == 0) continue;
      const double e = residual_energy_raw(hx, c);
      if (e > best.energy) best = {e, t};  // strict: earliest trial wins ties
    }
    partial[static_cast<std::size_t>(worker)] = best;
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < threads; ++w) pool.emplace_back(work, w);
    work(0);
  }
  Best best;
  for (const auto& p : partial) {
    if (p.trial >= 0 && (best.trial < 0 || p.energy > best.energy)) best = p;
  }
  if (best.trial < 0) throw Error(ErrorKind::InvalidParam, "no admissible candidate drawn");
  return BruteForceResult{.best = make_covariance(candidate_covariance(hx, p_w, best.trial, seed)),
                          .best_energy = best.energy,
                          .best_trial = best.trial};
}

GeometryReport geometry_report(const CovarianceMatrix& host, const CovarianceMatrix& watermark) {
  detail::require_same_dim(host.dim(), watermark.dim(), "geometry_report");
  const double total = host.trace() + watermark.trace();
  if (!(total > 0.0)) throw Error(ErrorKind::SingularSum, "tr(C_x + C_w) must be positive");
  const Matrix h = watermark_wiener(host, watermark).matrix();
  const Matrix c_what = h * host.matrix() * h.transpose() + h * watermark.matrix() * h.transpose();

  GeometryReport g;
  g.norm_w_sq = watermark.trace();
  g.norm_u_sq = g.norm_w_sq * g.norm_w_sq / total;
  g.norm_what_sq = c_what.trace();
  // E||w - Hy||^2 = tr(C_w) - 2 tr(H C_w) + tr(C_what)
  g.norm_residual_sq = g.norm_w_sq - 2.0 * trace_of_product(h, watermark.matrix()) + g.norm_what_sq;
  g.pythagoras_gap = std::abs(g.norm_w_sq - g.norm_what_sq - g.norm_residual_sq);
  return g;
}

}  // namespace eewm
