#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "eewm/error.hpp"

namespace eewm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative asymmetry above which ingestion is rejected instead of symmetrized.
inline constexpr double kSymmetryTolerance = 1e-8;
/// Eigenvalues may dip to -kPsdFloor * lambda_max and still count as PSD.
inline constexpr double kPsdFloor = 1e-10;

/// Symmetric positive-semidefinite N x N matrix in signal-power units.
///
/// Instances only come out of make_covariance() (or the helpers built on it),
/// so every live object has passed the symmetry and eigenvalue-floor checks.
class CovarianceMatrix {
 public:
  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const noexcept { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }
  double trace() const { return entries_.trace(); }

  /// Ascending eigenvalues.
  Vector eigenvalues() const;

  CovarianceMatrix scaled(double factor) const;

  friend CovarianceMatrix make_covariance(const Matrix& entries);

 private:
  explicit CovarianceMatrix(Matrix entries) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Symmetrizes (A + A^T)/2 and validates. Throws NotSymmetric, NotPSD or
/// InvalidParam (non-square / non-finite input).
CovarianceMatrix make_covariance(const Matrix& entries);

CovarianceMatrix identity_covariance(int n, double variance = 1.0);

/// Symmetric Toeplitz matrix with entry (i,j) = r[|i-j|].
CovarianceMatrix toeplitz_from_autocorr(std::span<const double> r);

/// r[k] = variance * rho^k, k = 0..n-1.
std::vector<double> ar1_autocorr(double variance, double rho, int n);

/// D C D with D = diag(envelope); turns a stationary model into a non-stationary one.
CovarianceMatrix modulate(const CovarianceMatrix& c, std::span<const double> envelope);

/// tr(C) / N
double average_power(const CovarianceMatrix& c);

// ---------------------------------------------------------------------------
// Random ensembles

/// Identifier recorded in every SampleBatch. Batch seeds are expanded with
/// SplitMix64, drawn with std::mt19937_64 and shaped by
/// std::normal_distribution<double>, so bit-exact replay holds for a given
/// standard library.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/splitmix64-substream/std-normal";

/// Seed of substream `index` under `seed`; independent of evaluation order.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// M realizations of an N-dimensional zero-mean vector, one per row.
struct SampleBatch {
  Matrix data;  // M x N
  std::uint64_t seed = 0;
  std::string_view rng_algorithm = kRngAlgorithm;

  int dim() const noexcept { return static_cast<int>(data.cols()); }
  int count() const noexcept { return static_cast<int>(data.rows()); }
};

/// Draws M i.i.d. N(0, C) rows using a symmetric eigen square root of C, so
/// singular covariances (including C = 0) are allowed.
SampleBatch sample_ensemble(const CovarianceMatrix& c, int count, std::uint64_t seed);

/// (1/M) sum row * row^T; the mean is known to be zero so no centering.
Matrix empirical_covariance(const SampleBatch& batch);

}  // namespace eewm
