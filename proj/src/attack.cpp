#include "eewm/attack.hpp"

namespace eewm {

FilterMatrix watermark_wiener(const CovarianceMatrix& host, const CovarianceMatrix& watermark) {
  return wiener_filter(watermark, host);
}

FilterMatrix attack_matrix(const FilterMatrix& h, double gamma) {
  const auto n = h.dim();
  return FilterMatrix(Matrix::Identity(n, n) - gamma * h.matrix());
}

double attack_distortion(const FilterMatrix& g, const CovarianceMatrix& host,
                         const CovarianceMatrix& watermark, const CovarianceMatrix& noise) {
  detail::require_same_dim(g.dim(), host.dim(), "attack_distortion");
  detail::require_same_dim(host.dim(), watermark.dim(), "attack_distortion");
  detail::require_same_dim(host.dim(), noise.dim(), "attack_distortion");
  const Matrix& gm = g.matrix();
  const Matrix& cx = host.matrix();
  const double total = (gm * cx * gm.transpose()).trace() +
                       (gm * watermark.matrix() * gm.transpose()).trace() - (gm * cx).trace() -
                       (gm.transpose() * cx).trace() + noise.trace() + cx.trace();
  return total / host.dim();
}

double average_correlation(const FilterMatrix& g, const CovarianceMatrix& watermark) {
  detail::require_same_dim(g.dim(), watermark.dim(), "average_correlation");
  // tr(G C_w) without forming the product
  return g.matrix().cwiseProduct(watermark.matrix().transpose()).sum() / watermark.dim();
}

AttackSolution solve_attack(const CovarianceMatrix& host, const CovarianceMatrix& watermark,
                            double r_target) {
  detail::require_same_dim(host.dim(), watermark.dim(), "solve_attack");
  const int n = host.dim();
  FilterMatrix h = watermark_wiener(host, watermark);
  const double leverage = h.matrix().cwiseProduct(watermark.matrix().transpose()).sum();
  const double scale = host.trace() + watermark.trace();
  if (!(leverage > 1e-12 * scale)) {
    throw Error(ErrorKind::DegenerateWatermark, "tr(H C_w) is numerically zero");
  }
  const double gamma = (watermark.trace() - n * r_target) / leverage;
  FilterMatrix g = attack_matrix(h, gamma);
  const auto no_noise = make_covariance(Matrix::Zero(n, n));

  AttackSolution sol{.g = g,
                     .gamma = gamma,
                     .lagrange = 2.0 * (gamma - 1.0),
                     .r_target = r_target,
                     .distortion = attack_distortion(g, host, watermark, no_noise),
                     .correlation_achieved = average_correlation(g, watermark)};
  return sol;
}

SampleBatch apply_attack(const FilterMatrix& g, const SampleBatch& y_batch) {
  detail::require_same_dim(g.dim(), y_batch.dim(), "apply_attack");
  SampleBatch out;
  out.data = y_batch.data * g.matrix().transpose();
  out.seed = y_batch.seed;
  out.rng_algorithm = y_batch.rng_algorithm;
  return out;
}

}  // namespace eewm
