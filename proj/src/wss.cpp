#include "eewm/wss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eewm/design.hpp"

namespace eewm {

SpectralModel ar1_psd(double variance, double rho, int n, SpectrumSource source) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::InvalidParam, "AR(1) needs |rho| < 1");
  if (!(variance > 0.0)) throw Error(ErrorKind::InvalidParam, "AR(1) needs variance > 0");
  if (n < 1) throw Error(ErrorKind::InvalidParam, "grid length must be positive");

  SpectralModel model;
  model.n = n;
  model.source = source;
  model.frequencies.resize(static_cast<std::size_t>(n));
  model.psd_values.resize(static_cast<std::size_t>(n));
  const double numer = variance * (1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / n;
    model.frequencies[static_cast<std::size_t>(i)] = f;
    model.psd_values[static_cast<std::size_t>(i)] =
        numer / (1.0 - 2.0 * rho * std::cos(2.0 * std::numbers::pi * f) + rho * rho);
  }
  return model;
}

bool is_toeplitz(const CovarianceMatrix& c) {
  const Matrix& m = c.matrix();
  const auto n = m.rows();
  const double tol = 1e-12 * m.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(i - 1, j - 1)) > tol) return false;
    }
  }
  return true;
}

SpectralModel attach_eigenvalues(SpectralModel model, const CovarianceMatrix& c) {
  if (model.n != c.dim()) throw Error(ErrorKind::DimensionMismatch, "spectral grid size differs");
  const Vector ev = c.eigenvalues();
  model.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  return model;
}

double toeplitz_eigen_gap(const CovarianceMatrix& c, const SpectralModel& model) {
  if (!is_toeplitz(c)) throw Error(ErrorKind::NotToeplitz, "covariance is not Toeplitz");
  if (model.n != c.dim() || static_cast<int>(model.psd_values.size()) != c.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "spectral grid size differs");
  }
  std::vector<double> eig = model.eigenvalues;
  if (eig.empty()) eig = attach_eigenvalues(model, c).eigenvalues;
  std::sort(eig.begin(), eig.end());
  std::vector<double> psd = model.psd_values;
  std::sort(psd.begin(), psd.end());

  const double peak = psd.back();
  if (!(peak > 0.0)) throw Error(ErrorKind::InvalidParam, "spectrum is identically zero");
  double gap = 0.0;
  for (std::size_t i = 0; i < psd.size(); ++i) gap = std::max(gap, std::abs(eig[i] - psd[i]));
  return gap / peak;
}

PsdConditionReport psd_condition_check(const CovarianceMatrix& host, double p_w) {
  if (!is_toeplitz(host)) throw Error(ErrorKind::NotToeplitz, "host covariance is not Toeplitz");
  const auto design = optimal_watermark_covariance(host, p_w);
  const Vector host_ev = host.eigenvalues();
  const Vector wm_ev = design.c_w_opt.eigenvalues();
  if (!(host_ev.minCoeff() > 0.0)) {
    throw Error(ErrorKind::SingularSum, "host covariance must be positive definite");
  }
  PsdConditionReport report;
  report.sigma_ratio = p_w / host(0, 0);
  for (Eigen::Index i = 0; i < host_ev.size(); ++i) {
    report.max_psd_ratio_error =
        std::max(report.max_psd_ratio_error, std::abs(wm_ev(i) / host_ev(i) - report.sigma_ratio));
  }
  return report;
}

}  // namespace eewm
