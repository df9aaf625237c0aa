#pragma once

#include "eewm/core.hpp"

namespace eewm {

/// General N x N linear map (W, H or G). Square with finite entries.
class FilterMatrix {
 public:
  explicit FilterMatrix(Matrix entries);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const noexcept { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

struct WienerOptions {
  /// When true, a numerically singular C_s + C_n is handled with an
  /// eigendecomposition pseudo-solve instead of raising SingularSum.
  bool allow_pseudo_solve = false;
};

/// W = C_s (C_s + C_n)^-1, obtained from the symmetric solve (C_s + C_n) W^T = C_s.
FilterMatrix wiener_filter(const CovarianceMatrix& signal, const CovarianceMatrix& noise,
                           WienerOptions options = {});

/// C_e = (I - W) C_s, symmetrized.
CovarianceMatrix error_covariance(const FilterMatrix& w, const CovarianceMatrix& signal);

/// W * observation
Vector estimate(const FilterMatrix& w, const Vector& observation);

/// (1/N) tr(W C_y W^T - W C_s - C_s W^T + C_s), C_y = C_s + C_n.
double estimation_mse(const FilterMatrix& w, const CovarianceMatrix& signal,
                      const CovarianceMatrix& noise);

namespace detail {

/// Solves sum * X = rhs for symmetric PSD `sum`; throws SingularSum when the
/// smallest eigenvalue is not above N * 1e-12 * largest eigenvalue.
Matrix solve_symmetric(const Matrix& sum, const Matrix& rhs, bool allow_pseudo_solve = false);

void require_same_dim(int a, int b, const char* what);

}  // namespace detail

}  // namespace eewm
