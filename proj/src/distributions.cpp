#include "ldtail/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ldtail/errors.hpp"
#include "ldtail/format.hpp"

namespace ldtail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Logistic function evaluated without cancellation in either tail.
double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void require_domain(const DistributionModel& model, double beta) {
  if (std::isnan(beta) || !natural_domain(model).contains(beta)) {
    throw DomainError("beta = " + format_real(beta) +
                      " is outside the natural-parameter domain of " + model.to_spec());
  }
}

TiltedMoments finite_moments(const FinitePmf& pmf, double beta) {
  const auto& xs = pmf.support;
  const auto& ps = pmf.probabilities;
  std::vector<double> log_w(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) log_w[i] = std::log(ps[i]) + beta * xs[i];
  const double top = *std::max_element(log_w.begin(), log_w.end());

  double total = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    log_w[i] = std::exp(log_w[i] - top);
    total += log_w[i];
    first += log_w[i] * xs[i];
  }
  const double mean = first / total;
  double second = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dev = xs[i] - mean;
    second += log_w[i] * dev * dev;
  }
  return {top + std::log(total), mean, second / total};
}

TiltedMoments bernoulli_moments(const Bernoulli& b, double beta) {
  const double p = b.p;
  // ln(1 - p + p e^beta), arranged to stay accurate for either sign of beta.
  const double log_z = beta <= 0.0 ? std::log1p(p * std::expm1(beta))
                                   : beta + std::log1p((1.0 - p) * std::expm1(-beta));
  const double logit = beta + std::log(p) - std::log1p(-p);
  const double mean = logistic(logit);
  const double complement = logistic(-logit);
  return {log_z, mean, mean * complement};
}

// Smallest q <= 10^6 with ratio * q within tolerance of an integer, found
// from the continued-fraction convergents of ratio.
std::optional<double> lattice_denominator(double ratio) {
  constexpr double kMaxDenominator = 1e6;
  double h_prev = 1.0, h_prev2 = 0.0;
  double k_prev = 0.0, k_prev2 = 1.0;
  double x = ratio;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(x);
    const double h = a * h_prev + h_prev2;
    const double k = a * k_prev + k_prev2;
    if (k > kMaxDenominator) return std::nullopt;
    if (std::abs(ratio * k - std::round(ratio * k)) <= kLatticeTolerance) return k;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const double frac = x - a;
    if (frac <= 0.0) return std::nullopt;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

std::optional<LatticeInfo> finite_lattice(const FinitePmf& pmf) {
  constexpr double kMaxIndex = 1e7;
  const auto& xs = pmf.support;
  const double offset = xs.front();
  double span = xs[1] - xs[0];
  for (std::size_t i = 2; i < xs.size(); ++i) {
    const auto q = lattice_denominator((xs[i] - offset) / span);
    if (!q) return std::nullopt;
    span /= *q;
    if ((xs.back() - offset) / span > kMaxIndex) return std::nullopt;
  }
  for (double x : xs) {
    const double index = (x - offset) / span;
    if (std::abs(index - std::round(index)) > kLatticeTolerance) return std::nullopt;
  }
  return LatticeInfo{span, offset};
}

bool open_unit(double p) { return p > 0.0 && p < 1.0; }

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

DistributionModel DistributionModel::bernoulli(double p) {
  if (!open_unit(p)) throw ParseError("key 'p' must lie in (0, 1), got " + format_real(p));
  return DistributionModel(Bernoulli{p});
}

DistributionModel DistributionModel::poisson(double lambda) {
  if (!positive_finite(lambda)) {
    throw ParseError("key 'lambda' must be a positive real, got " + format_real(lambda));
  }
  return DistributionModel(Poisson{lambda});
}

DistributionModel DistributionModel::exponential(double rate) {
  if (!positive_finite(rate)) {
    throw ParseError("key 'rate' must be a positive real, got " + format_real(rate));
  }
  return DistributionModel(Exponential{rate});
}

DistributionModel DistributionModel::gaussian(double mean, double variance) {
  if (!std::isfinite(mean)) throw ParseError("key 'mean' must be a finite real");
  if (!positive_finite(variance)) {
    throw ParseError("key 'var' must be a positive real, got " + format_real(variance));
  }
  return DistributionModel(Gaussian{mean, variance});
}

DistributionModel DistributionModel::finite_pmf(std::vector<double> support,
                                                std::vector<double> probabilities) {
  if (support.size() != probabilities.size()) {
    throw ParseError("keys 'support' and 'probs' must have the same length");
  }
  if (support.size() < 2) throw ParseError("key 'support' needs at least two points");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i])) throw ParseError("key 'support' has a non-finite value");
    if (i > 0 && !(support[i] > support[i - 1])) {
      throw ParseError("key 'support' must be strictly increasing");
    }
    if (!(probabilities[i] > 0.0) || !std::isfinite(probabilities[i])) {
      throw ParseError("key 'probs' must contain positive reals");
    }
  }
  const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw ParseError("key 'probs' must sum to 1 (within 1e-12), got " + format_real(total));
  }
  return DistributionModel(FinitePmf{std::move(support), std::move(probabilities)});
}

std::string DistributionModel::to_spec() const {
  return std::visit(
      Overloaded{
          [](const Bernoulli& b) { return "bernoulli:p=" + format_short(b.p); },
          [](const Poisson& p) { return "poisson:lambda=" + format_short(p.lambda); },
          [](const Exponential& e) { return "exponential:rate=" + format_short(e.rate); },
          [](const Gaussian& g) {
            return "gaussian:mean=" + format_short(g.mean) + ",var=" + format_short(g.variance);
          },
          [](const FinitePmf& f) {
            std::string out = "pmf:support=";
            for (std::size_t i = 0; i < f.support.size(); ++i) {
              if (i) out += ',';
              out += format_short(f.support[i]);
            }
            out += ";probs=";
            for (std::size_t i = 0; i < f.probabilities.size(); ++i) {
              if (i) out += ',';
              out += format_short(f.probabilities[i]);
            }
            return out;
          },
      },
      kind_);
}

NaturalDomain natural_domain(const DistributionModel& model) {
  if (const auto* e = model.get_if<Exponential>()) return {-kInf, e->rate};
  return {-kInf, kInf};
}

TiltedMoments tilted_moments(const DistributionModel& model, double beta) {
  require_domain(model, beta);
  return std::visit(
      Overloaded{
          [beta](const Bernoulli& b) { return bernoulli_moments(b, beta); },
          [beta](const Poisson& p) {
            const double mean = p.lambda * std::exp(beta);
            return TiltedMoments{p.lambda * std::expm1(beta), mean, mean};
          },
          [beta](const Exponential& e) {
            const double gap = e.rate - beta;
            return TiltedMoments{-std::log1p(-beta / e.rate), 1.0 / gap, 1.0 / (gap * gap)};
          },
          [beta](const Gaussian& g) {
            return TiltedMoments{beta * g.mean + 0.5 * beta * beta * g.variance,
                                 g.mean + beta * g.variance, g.variance};
          },
          [beta](const FinitePmf& f) { return finite_moments(f, beta); },
      },
      model.kind());
}

double log_partition(const DistributionModel& model, double beta) {
  return tilted_moments(model, beta).log_partition;
}

double tilted_mean(const DistributionModel& model, double beta) {
  return tilted_moments(model, beta).mean;
}

double tilted_variance(const DistributionModel& model, double beta) {
  return tilted_moments(model, beta).variance;
}

MeanRange mean_range(const DistributionModel& model) {
  return std::visit(
      Overloaded{
          [](const Bernoulli& b) { return MeanRange{0.0, b.p, 1.0}; },
          [](const Poisson& p) { return MeanRange{0.0, p.lambda, kInf}; },
          [](const Exponential& e) { return MeanRange{0.0, 1.0 / e.rate, kInf}; },
          [](const Gaussian& g) { return MeanRange{-kInf, g.mean, kInf}; },
          [](const FinitePmf& f) {
            double mean = 0.0;
            for (std::size_t i = 0; i < f.support.size(); ++i) {
              mean += f.probabilities[i] * f.support[i];
            }
            return MeanRange{f.support.front(), mean, f.support.back()};
          },
      },
      model.kind());
}

std::optional<LatticeInfo> lattice_of(const DistributionModel& model) {
  return std::visit(
      Overloaded{
          [](const Bernoulli&) -> std::optional<LatticeInfo> { return LatticeInfo{1.0, 0.0}; },
          [](const Poisson&) -> std::optional<LatticeInfo> { return LatticeInfo{1.0, 0.0}; },
          [](const Exponential&) -> std::optional<LatticeInfo> { return std::nullopt; },
          [](const Gaussian&) -> std::optional<LatticeInfo> { return std::nullopt; },
          [](const FinitePmf& f) { return finite_lattice(f); },
      },
      model.kind());
}

}  // namespace ldtail
