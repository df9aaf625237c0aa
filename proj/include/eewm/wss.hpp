#pragma once

#include <vector>

#include "eewm/core.hpp"

namespace eewm {

enum class SpectrumSource { Host, Watermark };

/// Analytic spectrum of a stationary model on the grid f_i = i / N,
/// optionally paired with the sorted eigenvalues of its Toeplitz matrix.
struct SpectralModel {
  int n = 0;
  std::vector<double> frequencies;
  std::vector<double> psd_values;
  std::vector<double> eigenvalues;  // ascending; empty until attached
  SpectrumSource source = SpectrumSource::Host;
};

/// Phi(f) = s2 (1 - rho^2) / (1 - 2 rho cos(2 pi f) + rho^2) at f_i = i / N.
SpectralModel ar1_psd(double variance, double rho, int n,
                      SpectrumSource source = SpectrumSource::Host);

/// Constant along every diagonal to 1e-12 relative to the largest entry.
bool is_toeplitz(const CovarianceMatrix& c);

/// Attaches the ascending eigenvalues of `c` to a copy of `model`.
SpectralModel attach_eigenvalues(SpectralModel model, const CovarianceMatrix& c);

/// max_i |sorted eigenvalue_i - sorted Phi(f_i)| / max Phi.
/// Throws NotToeplitz or DimensionMismatch.
double toeplitz_eigen_gap(const CovarianceMatrix& c, const SpectralModel& model);

struct PsdConditionReport {
  double max_psd_ratio_error = 0.0;
  double sigma_ratio = 0.0;  // sigma_w^2 / sigma_x^2
};

/// Compares the eigenvalues of the optimal watermark covariance with those of
/// a Toeplitz host, pairwise in sorted order.
PsdConditionReport psd_condition_check(const CovarianceMatrix& host, double p_w);

}  // namespace eewm
