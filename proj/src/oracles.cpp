#include "ldtail/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ldtail/errors.hpp"
#include "ldtail/format.hpp"
#include "ldtail/numerics.hpp"
#include "ldtail/tilting.hpp"

namespace ldtail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kSamplesPerStream = 1 << 14;
constexpr double kWilsonZ = 1.959963984540054;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void require_positive_n(std::int64_t n) {
  if (n < 1) throw RangeError("sample count n must be positive, got " + std::to_string(n));
}

// First sum-lattice index at or above n*mu, for unit span and zero offset.
double first_integer_at_or_above(std::int64_t n, double mu) {
  return std::ceil(static_cast<double>(n) * mu - kLatticeTolerance);
}

struct PmfLayout {
  LatticeInfo lattice;
  std::vector<std::int64_t> index;
  std::int64_t max_index;
};

PmfLayout pmf_layout(const DistributionModel& model) {
  const auto* pmf = model.get_if<FinitePmf>();
  const auto lattice = lattice_of(model);
  if (!pmf || !lattice) {
    throw UnsupportedModelError("exact convolution needs a lattice-valued finite pmf, got " +
                                model.to_spec());
  }
  PmfLayout layout{*lattice, {}, 0};
  for (double x : pmf->support) {
    const auto k = static_cast<std::int64_t>(std::llround((x - lattice->offset) / lattice->span));
    layout.index.push_back(k);
    layout.max_index = std::max(layout.max_index, k);
  }
  return layout;
}

bool within_convolution_budget(const PmfLayout& layout, std::size_t support_size,
                               std::int64_t n) {
  const double nd = static_cast<double>(n);
  const double m = static_cast<double>(support_size);
  return nd * m <= 1e6 && nd * nd * static_cast<double>(layout.max_index) * m <= 1e9;
}

// Sum of n draws compared against a threshold; lattice laws compare half a
// span below the snapped grid point so rounding in the running sum is harmless.
double sum_threshold(const DistributionModel& model, std::int64_t n, double mu) {
  const auto nd = static_cast<double>(n);
  if (const auto lattice = lattice_of(model)) {
    const double index = std::ceil((nd * mu - nd * lattice->offset) / lattice->span -
                                   kLatticeTolerance);
    return index * lattice->span + nd * lattice->offset - 0.5 * lattice->span;
  }
  return nd * mu;
}

template <class Draw>
std::int64_t count_hits(Draw&& draw, CounterRng& rng, std::int64_t n, std::int64_t samples,
                        double threshold) {
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) sum += draw(rng);
    if (sum >= threshold) ++hits;
  }
  return hits;
}

std::int64_t stream_hits(const DistributionModel& model, std::int64_t n, double threshold,
                         std::int64_t samples, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  if (const auto* b = model.get_if<Bernoulli>()) {
    const double p = b->p;
    return count_hits([p](CounterRng& g) { return g.uniform() < p ? 1.0 : 0.0; }, rng, n,
                      samples, threshold);
  }
  if (const auto* e = model.get_if<Exponential>()) {
    const double rate = e->rate;
    return count_hits([rate](CounterRng& g) { return -std::log1p(-g.uniform()) / rate; }, rng,
                      n, samples, threshold);
  }
  if (const auto* p = model.get_if<Poisson>()) {
    std::poisson_distribution<std::int64_t> dist(p->lambda);
    return count_hits([&dist](CounterRng& g) { return static_cast<double>(dist(g)); }, rng, n,
                      samples, threshold);
  }
  if (const auto* g = model.get_if<Gaussian>()) {
    std::normal_distribution<double> dist(g->mean, std::sqrt(g->variance));
    return count_hits([&dist](CounterRng& r) { return dist(r); }, rng, n, samples, threshold);
  }
  const auto& pmf = *model.get_if<FinitePmf>();
  std::vector<double> cumulative(pmf.probabilities.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    acc += pmf.probabilities[i];
    cumulative[i] = acc;
  }
  cumulative.back() = std::numeric_limits<double>::infinity();
  return count_hits(
      [&](CounterRng& r) {
        const double u = r.uniform();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return pmf.support[static_cast<std::size_t>(it - cumulative.begin())];
      },
      rng, n, samples, threshold);
}

}  // namespace

double binomial_tail(std::int64_t n, double p, double mu) {
  require_positive_n(n);
  if (!(p > 0.0 && p < 1.0)) throw RangeError("p must lie in (0, 1), got " + format_real(p));
  const double first = first_integer_at_or_above(n, mu);
  if (first <= 0.0) return 0.0;
  if (first > static_cast<double>(n)) return kNegInf;

  const auto k0 = static_cast<std::int64_t>(first);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n - k0 + 1));
  for (std::int64_t k = k0; k <= n; ++k) {
    terms.push_back(*log_binomial_coefficient(n, k) + static_cast<double>(k) * log_p +
                    static_cast<double>(n - k) * log_q);
  }
  return log_sum(terms);
}

double gamma_tail(std::int64_t n, double rate, double mu) {
  require_positive_n(n);
  if (!(rate > 0.0)) throw RangeError("rate must be positive, got " + format_real(rate));
  if (mu <= 0.0) return 0.0;
  const auto nd = static_cast<double>(n);
  return log_reg_gamma_upper(nd, rate * nd * mu);
}

double gaussian_tail(std::int64_t n, double mean, double variance, double mu) {
  require_positive_n(n);
  if (!(variance > 0.0)) throw RangeError("variance must be positive");
  const double z = std::sqrt(static_cast<double>(n)) * (mu - mean) / std::sqrt(variance);
  return log_std_normal_cdf(-z);
}

double poisson_sum_tail(std::int64_t n, double lambda, double mu) {
  require_positive_n(n);
  if (!(lambda > 0.0)) throw RangeError("lambda must be positive, got " + format_real(lambda));
  const double first = first_integer_at_or_above(n, mu);
  if (first <= 0.0) return 0.0;
  return log_reg_gamma_lower(first, static_cast<double>(n) * lambda);
}

double finite_pmf_tail(const DistributionModel& model, std::int64_t n, double mu) {
  require_positive_n(n);
  const PmfLayout layout = pmf_layout(model);
  const auto& pmf = *model.get_if<FinitePmf>();
  if (!within_convolution_budget(layout, pmf.support.size(), n)) {
    throw UnsupportedModelError("exact convolution for n = " + std::to_string(n) +
                                " exceeds the size budget; use Monte Carlo");
  }
  const auto nd = static_cast<double>(n);
  const double d = layout.lattice.span;
  const double offset = layout.lattice.offset;
  const double first = std::ceil((nd * mu - nd * offset) / d - kLatticeTolerance);
  const auto top = n * layout.max_index;
  if (first <= 0.0) return 0.0;
  if (first > static_cast<double>(top)) return kNegInf;
  const auto t = static_cast<std::int64_t>(first);

  // Convolve the law tilted towards the threshold so the mass that matters
  // stays far from underflow, then undo the tilt term by term:
  //   P0(S = x) = P_beta(S = x) * Z(beta)^n * exp(-beta x).
  const double grid_mean = (static_cast<double>(t) * d + nd * offset) / nd;
  const MeanRange range = mean_range(model);
  const double beta = range.contains(grid_mean) ? solve_tilt(model, grid_mean).beta_hat : 0.0;
  const double log_z = log_partition(model, beta);

  std::vector<double> tilted(pmf.support.size());
  for (std::size_t i = 0; i < tilted.size(); ++i) {
    tilted[i] = std::exp(std::log(pmf.probabilities[i]) + beta * pmf.support[i] - log_z);
  }
  std::vector<double> dist{1.0};
  std::vector<double> next;
  for (std::int64_t step = 0; step < n; ++step) {
    next.assign(dist.size() + static_cast<std::size_t>(layout.max_index), 0.0);
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == 0.0) continue;
      for (std::size_t i = 0; i < tilted.size(); ++i) {
        next[s + static_cast<std::size_t>(layout.index[i])] += dist[s] * tilted[i];
      }
    }
    dist.swap(next);
  }

  std::vector<double> terms;
  for (auto s = static_cast<std::size_t>(t); s < dist.size(); ++s) {
    if (dist[s] > 0.0) {
      const double x = static_cast<double>(s) * d + nd * offset;
      terms.push_back(std::log(dist[s]) - beta * x);
    }
  }
  if (terms.empty()) return kNegInf;
  return nd * log_z + log_sum(terms);
}

bool has_exact_tail(const DistributionModel& model, std::int64_t n) {
  const auto* pmf = model.get_if<FinitePmf>();
  if (!pmf) return true;
  if (!lattice_of(model)) return false;
  return within_convolution_budget(pmf_layout(model), pmf->support.size(), n);
}

double exact_tail(const DistributionModel& model, std::int64_t n, double mu) {
  if (const auto* b = model.get_if<Bernoulli>()) return binomial_tail(n, b->p, mu);
  if (const auto* p = model.get_if<Poisson>()) return poisson_sum_tail(n, p->lambda, mu);
  if (const auto* e = model.get_if<Exponential>()) return gamma_tail(n, e->rate, mu);
  if (const auto* g = model.get_if<Gaussian>()) return gaussian_tail(n, g->mean, g->variance, mu);
  return finite_pmf_tail(model, n, mu);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : counter_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

CounterRng::result_type CounterRng::operator()() {
  counter_ += 0x9e3779b97f4a7c15ULL;
  return mix64(counter_);
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

McEstimate wilson_interval(std::int64_t hits, std::int64_t trials) {
  const auto n = static_cast<double>(trials);
  const double phat = static_cast<double>(hits) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {phat, std::clamp(center - half, 0.0, phat), std::clamp(center + half, phat, 1.0),
          trials, 0};
}

McEstimate mc_tail(const DistributionModel& model, std::int64_t n, double mu,
                   std::int64_t samples, std::uint64_t seed, unsigned threads) {
  require_positive_n(n);
  if (samples < 1000) {
    throw RangeError("Monte Carlo needs at least 1000 samples, got " + std::to_string(samples));
  }
  const double threshold = sum_threshold(model, n, mu);
  const std::int64_t streams = (samples + kSamplesPerStream - 1) / kSamplesPerStream;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, streams));

  std::vector<std::int64_t> hits(static_cast<std::size_t>(streams), 0);
  std::atomic<std::int64_t> next_stream{0};
  auto worker = [&] {
    for (std::int64_t s = next_stream++; s < streams; s = next_stream++) {
      const std::int64_t count = std::min(kSamplesPerStream, samples - s * kSamplesPerStream);
      hits[static_cast<std::size_t>(s)] =
          stream_hits(model, n, threshold, count, seed, static_cast<std::uint64_t>(s));
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::int64_t total = 0;
  for (auto h : hits) total += h;
  McEstimate estimate = wilson_interval(total, samples);
  estimate.seed = seed;
  return estimate;
}

}  // namespace ldtail
