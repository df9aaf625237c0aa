#include "eewm/wiener.hpp"

#include <string>

namespace eewm {

FilterMatrix::FilterMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error(ErrorKind::InvalidParam, "filter must be a non-empty square matrix");
  }
  if (!entries_.allFinite()) throw Error(ErrorKind::InvalidParam, "filter has non-finite entries");
}

namespace detail {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

Matrix solve_symmetric(const Matrix& sum, const Matrix& rhs, bool allow_pseudo_solve) {
  const auto n = sum.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sum);
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  const bool singular = eig.info() != Eigen::Success || !(hi > 0.0) ||
                        !(lo > static_cast<double>(n) * 1e-12 * hi);
  if (!singular) {
    Eigen::LDLT<Matrix> ldlt(sum);
    if (ldlt.info() == Eigen::Success) return ldlt.solve(rhs);
  }
  if (!allow_pseudo_solve) {
    throw Error(ErrorKind::SingularSum, "covariance sum is numerically singular (min eigenvalue " +
                                            std::to_string(lo) + ")");
  }
  const double cutoff = static_cast<double>(n) * 1e-12 * std::max(hi, 0.0);
  Vector inv = eig.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * rhs;
}

}  // namespace detail

FilterMatrix wiener_filter(const CovarianceMatrix& signal, const CovarianceMatrix& noise,
                           WienerOptions options) {
  detail::require_same_dim(signal.dim(), noise.dim(), "wiener_filter");
  const Matrix sum = signal.matrix() + noise.matrix();
  // W S = C_s  <=>  S W^T = C_s (both symmetric)
  Matrix wt = detail::solve_symmetric(sum, signal.matrix(), options.allow_pseudo_solve);
  return FilterMatrix(wt.transpose());
}

CovarianceMatrix error_covariance(const FilterMatrix& w, const CovarianceMatrix& signal) {
  detail::require_same_dim(w.dim(), signal.dim(), "error_covariance");
  const auto n = signal.dim();
  return make_covariance((Matrix::Identity(n, n) - w.matrix()) * signal.matrix());
}

Vector estimate(const FilterMatrix& w, const Vector& observation) {
  detail::require_same_dim(w.dim(), static_cast<int>(observation.size()), "estimate");
  return w.matrix() * observation;
}

double estimation_mse(const FilterMatrix& w, const CovarianceMatrix& signal,
                      const CovarianceMatrix& noise) {
  detail::require_same_dim(w.dim(), signal.dim(), "estimation_mse");
  detail::require_same_dim(signal.dim(), noise.dim(), "estimation_mse");
  const Matrix& g = w.matrix();
  const Matrix& cs = signal.matrix();
  const Matrix cy = cs + noise.matrix();
  const double total = (g * cy * g.transpose()).trace() - 2.0 * (g * cs).trace() + cs.trace();
  return total / signal.dim();
}

}  // namespace eewm
