#include "ldtail/tilting.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ldtail/errors.hpp"
#include "ldtail/format.hpp"
#include "ldtail/numerics.hpp"

namespace ldtail {

namespace {

constexpr int kMaxIterations = 200;
constexpr int kMaxBracketExpansions = 2100;

void require_mean_in_range(const DistributionModel& model, double mu) {
  const MeanRange range = mean_range(model);
  if (!range.contains(mu)) {
    throw RangeError("mu = " + format_real(mu) + " is outside the open mean range (" +
                     format_real(range.infimum) + ", " + format_real(range.supremum) + ") of " +
                     model.to_spec());
  }
}

TiltedSummary make_summary(double beta, double divergence, double variance, double log_z,
                           double mu) {
  return {beta, std::max(divergence, 0.0), variance, log_z, mu,
          std::abs(beta) < kNearBaseMeanTilt};
}

TiltedSummary summary_at(const DistributionModel& model, double beta, double mu) {
  const TiltedMoments m = tilted_moments(model, beta);
  return make_summary(beta, beta * mu - m.log_partition, m.variance, m.log_partition, mu);
}

struct ClosedForm {
  double mu;

  TiltedSummary operator()(const Bernoulli& b) const {
    const double p = b.p;
    const double log_odds_shift =
        (std::log(mu) - std::log(p)) + (std::log1p(-p) - std::log1p(-mu));
    const double divergence =
        mu * std::log(mu / p) + (1.0 - mu) * (std::log1p(-mu) - std::log1p(-p));
    const double log_z = std::log1p(-p) - std::log1p(-mu);
    return make_summary(log_odds_shift, divergence, mu * (1.0 - mu), log_z, mu);
  }

  TiltedSummary operator()(const Poisson& p) const {
    const double y = mu / p.lambda - 1.0;
    const double divergence = p.lambda * (log1pmx(y) + y * std::log1p(y));
    return make_summary(std::log(mu / p.lambda), divergence, mu, mu - p.lambda, mu);
  }

  TiltedSummary operator()(const Exponential& e) const {
    const double t = e.rate * mu;
    return make_summary(e.rate - 1.0 / mu, -log1pmx(t - 1.0), mu * mu, std::log(t), mu);
  }

  TiltedSummary operator()(const Gaussian& g) const {
    const double beta = (mu - g.mean) / g.variance;
    const double dev = mu - g.mean;
    return make_summary(beta, dev * dev / (2.0 * g.variance), g.variance,
                        beta * g.mean + 0.5 * beta * beta * g.variance, mu);
  }

  TiltedSummary operator()(const FinitePmf&) const {
    // Dispatched to the numeric route before reaching here.
    throw UnsupportedModelError("no closed-form tilt for finite pmf");
  }
};

}  // namespace

TiltedSummary solve_tilt_numeric(const DistributionModel& model, double mu) {
  require_mean_in_range(model, mu);
  const NaturalDomain domain = natural_domain(model);

  const double f_zero = tilted_mean(model, 0.0) - mu;
  if (f_zero == 0.0) return summary_at(model, 0.0, mu);

  // Expand geometrically from 0 towards the side where the tilted mean hits mu.
  const double direction = f_zero < 0.0 ? 1.0 : -1.0;
  const double endpoint = direction > 0.0 ? domain.upper : domain.lower;
  const bool capped = std::isfinite(endpoint);
  const double cap =
      capped ? endpoint - direction * 1e-12 * std::max(1.0, std::abs(endpoint)) : endpoint;

  double inner = 0.0;
  double outer = 0.0;
  double step = 1.0;
  bool straddled = false;
  for (int i = 0; i < kMaxBracketExpansions && !straddled; ++i) {
    outer = inner + direction * step;
    if (capped && direction * (outer - cap) > 0.0) outer = cap;
    const double f_outer = tilted_mean(model, outer) - mu;
    if (f_outer == 0.0) return summary_at(model, outer, mu);
    if ((f_outer > 0.0) != (f_zero > 0.0)) {
      straddled = true;
    } else {
      if (capped && outer == cap) break;
      inner = outer;
      step *= 2.0;
    }
  }
  if (!straddled) {
    throw ConvergenceError("could not bracket the tilt for mu = " + format_real(mu) + " in " +
                           model.to_spec());
  }

  double lo = std::min(inner, outer);
  double hi = std::max(inner, outer);
  double beta = inner;
  const double mean_tolerance = 1e-12 * std::max(1.0, std::abs(mu));
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const TiltedMoments m = tilted_moments(model, beta);
    const double f = m.mean - mu;
    if (f < 0.0) {
      lo = beta;
    } else {
      hi = beta;
    }
    const double newton = beta - f / m.variance;
    const bool newton_ok = m.variance > 0.0 && newton > lo && newton < hi;
    const double next = newton_ok ? newton : 0.5 * (lo + hi);

    if (std::abs(f) <= mean_tolerance) {
      // Polish once; the mean criterion alone leaves up to 1e-12/V on beta.
      return summary_at(model, newton_ok ? newton : beta, mu);
    }
    if (std::abs(next - beta) <= 1e-14 * std::max(1.0, std::abs(beta))) {
      return summary_at(model, next, mu);
    }
    beta = next;
  }
  throw ConvergenceError("tilt solver exhausted " + std::to_string(kMaxIterations) +
                         " iterations for mu = " + format_real(mu) + " in " + model.to_spec());
}

TiltedSummary solve_tilt(const DistributionModel& model, double mu) {
  if (model.get_if<FinitePmf>()) return solve_tilt_numeric(model, mu);
  require_mean_in_range(model, mu);
  return std::visit(ClosedForm{mu}, model.kind());
}

double divergence_derivative(const DistributionModel& model, double mu) {
  return solve_tilt(model, mu).beta_hat;
}

}  // namespace ldtail
