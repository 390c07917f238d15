#include "ldtail/approximations.hpp"

#include <cmath>
#include <string>

#include "ldtail/errors.hpp"
#include "ldtail/format.hpp"
#include "ldtail/numerics.hpp"

namespace ldtail {

namespace {

constexpr double kUnderflowLog = -700.0;
constexpr double kFixedPointTolerance = 1e-10;

ApproxResult make_result(double log_prob, Method method, std::optional<double> c,
                         const TiltedSummary& summary) {
  const double prob = log_prob >= kUnderflowLog ? std::exp(log_prob) : 0.0;
  return {log_prob, prob, method, c, summary};
}

void require_upper_tilt(const TiltedSummary& summary) {
  if (!(summary.beta_hat > 0.0)) {
    throw RangeError("upper-tail estimates need mu above the base mean (beta_hat = " +
                     format_real(summary.beta_hat) + ")");
  }
  if (summary.near_base_mean) {
    throw DegenerateTiltError("beta_hat = " + format_real(summary.beta_hat) +
                              " is too close to 0; mu is nearly the base mean");
  }
}

double lattice_index(const LatticeInfo& lattice, std::int64_t n, double mu) {
  const auto nd = static_cast<double>(n);
  return (nd * mu - nd * lattice.offset) / lattice.span;
}

bool on_sum_lattice(const LatticeInfo& lattice, std::int64_t n, double mu) {
  const double index = lattice_index(lattice, n, mu);
  return std::abs(index - std::round(index)) <= kLatticeTolerance;
}

void require_positive_n(std::int64_t n) {
  if (n < 1) throw RangeError("sample count n must be positive, got " + std::to_string(n));
}

void require_upper_tail_mu(const DistributionModel& model, double mu) {
  const MeanRange range = mean_range(model);
  if (!(mu > range.base_mean && mu < range.supremum)) {
    throw RangeError("mu = " + format_real(mu) + " must lie in (" + format_real(range.base_mean) +
                     ", " + format_real(range.supremum) + ") for " + model.to_spec());
  }
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::sanov:
      return "sanov";
    case Method::bahadur_rao:
      return "bahadur_rao";
    case Method::refined_gaussian:
      return "refined_gaussian";
  }
  return "unknown";
}

double sanov_log(const TiltedSummary& summary, std::int64_t n) {
  return -static_cast<double>(n) * summary.divergence;
}

double beta_factor(const DistributionModel& model, const TiltedSummary& summary) {
  require_upper_tilt(summary);
  const double beta = summary.beta_hat;
  if (const auto lattice = lattice_of(model)) {
    const double d = lattice->span;
    return -std::expm1(-d * beta) / d;
  }
  return beta;
}

ApproxResult bahadur_rao_log(const DistributionModel& model, const TiltedSummary& summary,
                             std::int64_t n) {
  require_positive_n(n);
  const double factor = beta_factor(model, summary);
  if (const auto lattice = lattice_of(model)) {
    if (!on_sum_lattice(*lattice, n, summary.target_mean)) {
      throw LatticeAlignmentError("n * mu = " +
                                  format_real(static_cast<double>(n) * summary.target_mean) +
                                  " is not on the sum lattice; round mu up to the grid first");
    }
  }
  const auto nd = static_cast<double>(n);
  const double log_prob = sanov_log(summary, n) -
                          0.5 * std::log(2.0 * kPi * nd * summary.variance) - std::log(factor);
  return make_result(log_prob, Method::bahadur_rao, std::nullopt, summary);
}

double c_mu_for_factor(const TiltedSummary& summary, double factor) {
  require_upper_tilt(summary);
  if (!(factor > 0.0) || !(summary.divergence > 0.0) || !(summary.variance > 0.0)) {
    throw DegenerateTiltError("c_mu needs positive divergence, variance and beta factor");
  }
  const double beta = summary.beta_hat;
  const double log_ratio = 0.5 * std::log(2.0 * summary.divergence / summary.variance);
  const double c = (log_ratio - std::log(factor)) / beta;

  const double residual =
      std::sqrt(2.0 * summary.divergence / summary.variance) / (factor * std::exp(c * beta)) - 1.0;
  if (!std::isfinite(c) || !(std::abs(residual) <= kFixedPointTolerance)) {
    throw DegenerateTiltError("c_mu fails its defining identity (residual " +
                              format_real(residual) + ")");
  }
  return c;
}

double c_mu(const DistributionModel& model, const TiltedSummary& summary) {
  return c_mu_for_factor(summary, beta_factor(model, summary));
}

double binomial_c_mu(double p, double mu) {
  if (!(p > 0.0 && p < 1.0)) throw RangeError("p must lie in (0, 1), got " + format_real(p));
  if (!(mu > p && mu < 1.0)) {
    throw RangeError("mu = " + format_real(mu) + " must lie in (p, 1) = (" + format_real(p) +
                     ", 1)");
  }
  const double divergence =
      mu * std::log(mu / p) + (1.0 - mu) * (std::log1p(-mu) - std::log1p(-p));
  const double dev = mu - p;
  const double log_odds = (std::log(mu) - std::log(p)) + (std::log1p(-p) - std::log1p(-mu));
  return 0.5 + std::log(2.0 * divergence * p * (1.0 - p) / (dev * dev)) / (2.0 * log_odds);
}

bool on_sum_lattice(const DistributionModel& model, std::int64_t n, double mu) {
  const auto lattice = lattice_of(model);
  return !lattice || on_sum_lattice(*lattice, n, mu);
}

double round_up_to_grid(const DistributionModel& model, std::int64_t n, double mu) {
  require_positive_n(n);
  const auto lattice = lattice_of(model);
  if (!lattice) {
    throw UnsupportedModelError(model.to_spec() + " is not lattice valued; no grid to round to");
  }
  const double index = lattice_index(*lattice, n, mu);
  const double k = std::ceil(index - kLatticeTolerance);
  const auto nd = static_cast<double>(n);
  const double grid = (k * lattice->span + nd * lattice->offset) / nd;
  return std::max(grid, mu);
}

TailQuery make_tail_query(const DistributionModel& model, std::int64_t n, double mu) {
  require_positive_n(n);
  require_upper_tail_mu(model, mu);
  TailQuery query{n, mu, std::nullopt};
  if (lattice_of(model)) {
    const double rounded = round_up_to_grid(model, n, mu);
    if (!(rounded < mean_range(model).supremum)) {
      throw RangeError("grid-rounded threshold " + format_real(rounded) +
                       " reaches the supremum of the mean range");
    }
    query.mu_rounded = rounded;
  }
  return query;
}

ApproxResult refined_gaussian_log(const DistributionModel& model, double mu, std::int64_t n,
                                  std::optional<double> constant_override) {
  const TailQuery query = make_tail_query(model, n, mu);
  const double threshold = query.mu_rounded.value_or(mu);
  const TiltedSummary summary = solve_tilt(model, threshold);
  require_upper_tilt(summary);

  const double c = constant_override ? *constant_override : c_mu(model, summary);
  const double shifted = threshold - c / static_cast<double>(n);
  const MeanRange range = mean_range(model);
  if (!(shifted > range.base_mean && shifted < range.supremum)) {
    throw ShiftError("shifted mean " + format_real(shifted) + " = mu - c/n left (" +
                     format_real(range.base_mean) + ", " + format_real(range.supremum) +
                     "); n = " + std::to_string(n) + " is too small");
  }
  const double shifted_divergence = solve_tilt(model, shifted).divergence;
  const double z = std::sqrt(2.0 * static_cast<double>(n) * shifted_divergence);
  return make_result(log_std_normal_cdf(-z), Method::refined_gaussian, c, summary);
}

double constant_sensitivity(const DistributionModel& model, const TiltedSummary& summary,
                            double c_alt) {
  return std::exp(summary.beta_hat * (c_mu(model, summary) - c_alt));
}

ApproxResult estimate_tail(const DistributionModel& model, const TailQuery& query,
                           Method method) {
  switch (method) {
    case Method::sanov: {
      const TiltedSummary summary = solve_tilt(model, query.mu_rounded.value_or(query.mu));
      return make_result(sanov_log(summary, query.n), Method::sanov, std::nullopt, summary);
    }
    case Method::bahadur_rao:
      return bahadur_rao_log(model, solve_tilt(model, query.mu_rounded.value_or(query.mu)),
                             query.n);
    case Method::refined_gaussian:
      return refined_gaussian_log(model, query.mu, query.n);
  }
  throw UnsupportedModelError("unknown method");
}

}  // namespace ldtail
