#include "eewm/core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace eewm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotToeplitz: return "NotToeplitz";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::FactorizationFailure: return "FactorizationFailure";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::SingularSum: return "SingularSum";
    case ErrorKind::DegenerateWatermark: return "DegenerateWatermark";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Vector CovarianceMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

CovarianceMatrix CovarianceMatrix::scaled(double factor) const {
  return make_covariance(factor * entries_);
}

CovarianceMatrix make_covariance(const Matrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw Error(ErrorKind::InvalidParam, "covariance must be a non-empty square matrix");
  }
  if (!entries.allFinite()) {
    throw Error(ErrorKind::InvalidParam, "covariance has non-finite entries");
  }
  const double scale = entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw Error(ErrorKind::NotSymmetric,
                "asymmetry " + std::to_string(asym) + " exceeds tolerance");
  }
  Matrix sym = 0.5 * (entries + entries.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPSD, "eigenvalue computation did not converge");
  }
  const Vector& ev = solver.eigenvalues();
  const double floor = -kPsdFloor * std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() < floor) {
    throw Error(ErrorKind::NotPSD, "smallest eigenvalue " + std::to_string(ev.minCoeff()) +
                                       " below the PSD floor");
  }
  return CovarianceMatrix(std::move(sym));
}

CovarianceMatrix identity_covariance(int n, double variance) {
  if (n < 1) throw Error(ErrorKind::InvalidParam, "dimension must be positive");
  return make_covariance(variance * Matrix::Identity(n, n));
}

CovarianceMatrix toeplitz_from_autocorr(std::span<const double> r) {
  if (r.empty() || !(r[0] > 0.0)) {
    throw Error(ErrorKind::InvalidParam, "autocorrelation needs r[0] > 0");
  }
  const auto n = static_cast<Eigen::Index>(r.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = r[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  return make_covariance(m);
}

std::vector<double> ar1_autocorr(double variance, double rho, int n) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::InvalidParam, "AR(1) needs |rho| < 1");
  if (!(variance > 0.0)) throw Error(ErrorKind::InvalidParam, "AR(1) needs variance > 0");
  if (n < 1) throw Error(ErrorKind::InvalidParam, "length must be positive");
  std::vector<double> r(static_cast<std::size_t>(n));
  double p = variance;
  for (auto& v : r) {
    v = p;
    p *= rho;
  }
  return r;
}

CovarianceMatrix modulate(const CovarianceMatrix& c, std::span<const double> envelope) {
  if (static_cast<int>(envelope.size()) != c.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "envelope length differs from dimension");
  }
  Vector d(c.dim());
  for (int i = 0; i < c.dim(); ++i) {
    const double e = envelope[static_cast<std::size_t>(i)];
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw Error(ErrorKind::InvalidParam, "envelope entries must be positive");
    }
    d(i) = e;
  }
  return make_covariance(d.asDiagonal() * c.matrix() * d.asDiagonal());
}

double average_power(const CovarianceMatrix& c) { return c.trace() / c.dim(); }

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Symmetric square root B with B B^T = C; eigenvalues in the tolerated
// negative band are clamped to zero.
bool try_sqrt(const Matrix& c, Matrix& root) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
  if (solver.info() != Eigen::Success) return false;
  Vector ev = solver.eigenvalues();
  const double floor = -kPsdFloor * std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() < floor) return false;
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  root = solver.eigenvectors() * ev.asDiagonal() * solver.eigenvectors().transpose();
  return true;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

SampleBatch sample_ensemble(const CovarianceMatrix& c, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::InvalidParam, "sample count must be at least 1");
  const int n = c.dim();

  Matrix root;
  if (!try_sqrt(c.matrix(), root)) {
    const double jitter = 1e-12 * std::max(c.trace(), 0.0) / n;
    Matrix bumped = c.matrix() + jitter * Matrix::Identity(n, n);
    if (!try_sqrt(bumped, root)) {
      throw Error(ErrorKind::FactorizationFailure, "covariance square root failed after jitter");
    }
  }

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Row-major fill keeps the draw order independent of Eigen's storage order.
  Matrix z(count, n);
  for (int m = 0; m < count; ++m) {
    for (int i = 0; i < n; ++i) z(m, i) = normal(engine);
  }
  SampleBatch batch;
  batch.data = z * root.transpose();
  batch.seed = seed;
  return batch;
}

Matrix empirical_covariance(const SampleBatch& batch) {
  if (batch.count() < 2) throw Error(ErrorKind::TooFewSamples, "need at least two samples");
  return (batch.data.transpose() * batch.data) / static_cast<double>(batch.count());
}

}  // namespace eewm
