#pragma once

#include <cstdint>

#include "eewm/core.hpp"
#include "eewm/wiener.hpp"

namespace eewm {

/// Energy-efficient watermark covariance for a host under a power budget.
struct DesignSolution {
  CovarianceMatrix c_w_opt;
  double c = 0.0;          // p_w / p_x
  double p_w = 0.0;
  double p_x = 0.0;
  double lagrange = 0.0;   // designer's multiplier, -1 / (1 + c)^2
  double residual_energy = 0.0;
  double alpha = 0.0;      // c / (1 + c); H y = alpha y at the optimum
};

/// C_what = H C_x H^T + H C_w H^T
CovarianceMatrix estimated_watermark_covariance(const CovarianceMatrix& host,
                                                const CovarianceMatrix& watermark);

/// Watermark power left after the Wiener removal attack:
/// E = (1/N) [tr(C_w) - tr(C_w (C_x + C_w)^-1 C_w)].
double residual_energy(const CovarianceMatrix& host, const CovarianceMatrix& watermark);

/// Residual power after subtracting gamma * H y instead of H y:
/// (1/N) [tr(C_w) - 2 gamma tr(H C_w) + gamma^2 tr(C_what)].
/// Reduces to residual_energy() at gamma = 1.
double residual_energy_gamma(const CovarianceMatrix& host, const CovarianceMatrix& watermark,
                             double gamma);

/// C_w = (p_w / p_x) C_x. Throws InvalidParam for non-positive powers.
DesignSolution optimal_watermark_covariance(const CovarianceMatrix& host, double p_w);

/// Proportionality constants of the two stationary branches for a designer
/// multiplier lambda < 0: {(1 - s)/s, (1 + s)/(-s)} with s = sqrt(-lambda).
/// The second is always negative and is rejected.
struct StationaryBranches {
  double retained = 0.0;
  double rejected = 0.0;
};
StationaryBranches stationary_branches(double lagrange);

/// ||(1+l) I + S^-1 C_w^2 S^-1 - C_w S^-1 - S^-1 C_w||_F / N with S = C_x + C_w.
double stationarity_residual(const CovarianceMatrix& host, const CovarianceMatrix& watermark,
                             double lagrange);

/// Largest central-difference derivative of residual_energy() at `watermark`
/// along `n_directions` random unit-Frobenius, trace-free symmetric directions.
/// Directions are confined to the range of `watermark` so that both probe
/// points stay PSD.
double tangent_gradient_check(const CovarianceMatrix& host, const CovarianceMatrix& watermark,
                              int n_directions, double step, std::uint64_t seed = 1);

/// Same check evaluated at the optimal covariance for budget p_w.
double tangent_gradient_check(const CovarianceMatrix& host, double p_w, int n_directions,
                              double step, std::uint64_t seed = 1);

struct BruteForceResult {
  CovarianceMatrix best;
  double best_energy = 0.0;
  int best_trial = -1;
};

/// Random search over PSD covariances with trace N * p_w. The candidate mix
/// cycles through full Wishart, rank-deficient Wishart, diagonal and
/// host-aligned-plus-perturbation draws; each trial uses its own substream and
/// ties go to the lowest trial index, so the result does not depend on
/// `threads`.
BruteForceResult brute_force_best_covariance(const CovarianceMatrix& host, double p_w, int trials,
                                             std::uint64_t seed, int threads = 0);

/// Closed-form Hilbert-space norms under <u, v> = E(u^T v).
struct GeometryReport {
  double norm_w_sq = 0.0;     // ||w||^2 = tr(C_w)
  double norm_u_sq = 0.0;     // projection of w onto the single vector y
  double norm_what_sq = 0.0;  // ||H y||^2 = tr(C_what)
  double norm_residual_sq = 0.0;  // ||w - H y||^2, expanded without the trace identity
  double pythagoras_gap = 0.0;    // | ||w||^2 - ||what||^2 - ||w - what||^2 |
};

GeometryReport geometry_report(const CovarianceMatrix& host, const CovarianceMatrix& watermark);

}  // namespace eewm
