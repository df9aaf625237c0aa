#pragma once

#include "eewm/core.hpp"
#include "eewm/wiener.hpp"

namespace eewm {

/// Optimal linear attack G = I - gamma * H for a target average correlation.
struct AttackSolution {
  FilterMatrix g;
  double gamma = 0.0;
  double lagrange = 0.0;  // attacker's multiplier, gamma = 1 + lagrange / 2
  double r_target = 0.0;
  double distortion = 0.0;
  double correlation_achieved = 0.0;
};

/// H = C_w (C_x + C_w)^-1, the Wiener estimator of the watermark from y = x + w.
FilterMatrix watermark_wiener(const CovarianceMatrix& host, const CovarianceMatrix& watermark);

/// I - gamma * H
FilterMatrix attack_matrix(const FilterMatrix& h, double gamma);

/// Average distortion (1/N) E||G(x + w) + v - x||^2 in trace form.
double attack_distortion(const FilterMatrix& g, const CovarianceMatrix& host,
                         const CovarianceMatrix& watermark, const CovarianceMatrix& noise);

/// Average linear correlation r = (1/N) tr(G C_w).
double average_correlation(const FilterMatrix& g, const CovarianceMatrix& watermark);

/// Minimizes attack distortion subject to r = r_target. The optimal added
/// noise is zero, so the returned distortion assumes C_v = 0. gamma follows
/// in closed form from the linear constraint; it is not range-checked and
/// may be negative or exceed 2.
///
/// Throws DegenerateWatermark when tr(H C_w) gives the attacker no leverage.
AttackSolution solve_attack(const CovarianceMatrix& host, const CovarianceMatrix& watermark,
                            double r_target);

/// Maps every row y of the batch to G y.
SampleBatch apply_attack(const FilterMatrix& g, const SampleBatch& y_batch);

}  // namespace eewm
