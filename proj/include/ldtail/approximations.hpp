#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ldtail/distributions.hpp"
#include "ldtail/tilting.hpp"

namespace ldtail {

enum class Method { sanov, bahadur_rao, refined_gaussian };

std::string_view to_string(Method method);

/// A tail request P{mean of n draws >= mu}. For lattice models mu_rounded is
/// the threshold moved up to the sum lattice.
struct TailQuery {
  std::int64_t n;
  double mu;
  std::optional<double> mu_rounded;
};

/// Log-domain tail estimate. prob is exp(log_prob), or 0 once log_prob drops
/// below -700.
struct ApproxResult {
  double log_prob;
  double prob;
  Method method;
  std::optional<double> c_mu;
  TiltedSummary summary;
};

/// -n D(mu).
double sanov_log(const TiltedSummary& summary, std::int64_t n);

/// (1 - exp(-d beta_hat)) / d for lattice models of span d, beta_hat otherwise.
/// Throws DegenerateTiltError near the base mean and RangeError for beta_hat <= 0.
double beta_factor(const DistributionModel& model, const TiltedSummary& summary);

/// exp(-n D) / (sqrt(2 pi n V) * beta_factor). Lattice models need n*mu on the
/// sum lattice (LatticeAlignmentError otherwise).
ApproxResult bahadur_rao_log(const DistributionModel& model, const TiltedSummary& summary,
                             std::int64_t n);

/// ln( sqrt(2D) / (sqrt(V) * factor) ) / beta_hat, checked against its defining
/// identity sqrt(2D/V) / (factor * exp(c * beta_hat)) = 1 to 1e-10.
double c_mu_for_factor(const TiltedSummary& summary, double factor);

/// c_mu with the model's own beta_factor (lattice or non-lattice form).
double c_mu(const DistributionModel& model, const TiltedSummary& summary);

/// Closed form for Bernoulli(p):
///   1/2 + ln(2 D(mu||p) p (1-p) / (mu-p)^2) / (2 ln(mu (1-p) / (p (1-mu)))).
double binomial_c_mu(double p, double mu);

/// Whether n * mu lies on the sum lattice of a lattice model (within 1e-9 on
/// the lattice index). Always true for non-lattice models.
bool on_sum_lattice(const DistributionModel& model, std::int64_t n, double mu);

/// Smallest mu_n >= mu with n * mu_n on the sum lattice {k d + n delta}.
double round_up_to_grid(const DistributionModel& model, std::int64_t n, double mu);

/// Validates mu against the upper-tail range and, for lattice models, fills in
/// the grid-rounded threshold.
TailQuery make_tail_query(const DistributionModel& model, std::int64_t n, double mu);

/// log Phi(-sqrt(2 n D(mu' - c/n))), with mu' the grid-rounded threshold for
/// lattice models and c = c_mu at mu' unless an override constant is given.
ApproxResult refined_gaussian_log(const DistributionModel& model, double mu, std::int64_t n,
                                  std::optional<double> constant_override = std::nullopt);

/// Limiting ratio exp(beta_hat (c_mu - c_alt)) between the refined estimate
/// with c_mu and the one with c_alt.
double constant_sensitivity(const DistributionModel& model, const TiltedSummary& summary,
                            double c_alt);

/// Runs one method on a query; sanov and bahadur_rao use mu_rounded when present.
ApproxResult estimate_tail(const DistributionModel& model, const TailQuery& query, Method method);

}  // namespace ldtail
