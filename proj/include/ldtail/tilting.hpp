#pragma once

#include "ldtail/distributions.hpp"

namespace ldtail {

/// Tilt solved at a target mean mu: beta_hat with tilted mean mu, the
/// divergence D(mu) = beta_hat * mu - ln Z(beta_hat) and the tilted variance.
struct TiltedSummary {
  double beta_hat;
  double divergence;
  double variance;
  double log_partition_at_tilt;
  double target_mean;
  /// |beta_hat| < kNearBaseMeanTilt; c_mu is numerically indeterminate there.
  bool near_base_mean;
};

inline constexpr double kNearBaseMeanTilt = 1e-4;

/// Solves the tilt at mu, which must lie strictly inside mean_range(model).
/// Closed forms for the catalogue families, bracketed Newton for FinitePmf.
/// Throws RangeError outside the mean range.
TiltedSummary solve_tilt(const DistributionModel& model, double mu);

/// The generic root-finding route, usable on any model. solve_tilt uses it
/// for FinitePmf; tests use it to cross-check the closed forms.
TiltedSummary solve_tilt_numeric(const DistributionModel& model, double mu);

/// dD/dmu, which equals beta_hat(mu).
double divergence_derivative(const DistributionModel& model, double mu);

}  // namespace ldtail
