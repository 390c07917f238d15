#pragma once

#include <cstdint>

#include "ldtail/distributions.hpp"

namespace ldtail {

/// Monte Carlo tail estimate with a 95% Wilson score interval.
struct McEstimate {
  double point;
  double ci_low;
  double ci_high;
  std::int64_t samples;
  std::uint64_t seed;
};

// Exact oracles. Each returns ln P{X_1 + ... + X_n >= n mu}; 0 means
// probability one and -inf an empty tail. Lattice thresholds are snapped to
// the grid with the library-wide 1e-9 index tolerance.

double binomial_tail(std::int64_t n, double p, double mu);
double gamma_tail(std::int64_t n, double rate, double mu);
double gaussian_tail(std::int64_t n, double mean, double variance, double mu);
double poisson_sum_tail(std::int64_t n, double lambda, double mu);

/// Exact tail of a lattice FinitePmf by convolution of the tilted law.
/// Throws UnsupportedModelError when the model is not lattice valued or the
/// convolution exceeds the size budget (n * |support| <= 1e6 and
/// n^2 * max_index * |support| <= 1e9).
double finite_pmf_tail(const DistributionModel& model, std::int64_t n, double mu);

/// Whether exact_tail can answer (model, n) without Monte Carlo.
bool has_exact_tail(const DistributionModel& model, std::int64_t n);

/// Dispatches to the matching exact oracle.
double exact_tail(const DistributionModel& model, std::int64_t n, double mu);

/// Counter-based 64-bit generator (SplitMix64). Stream k of a seed is an
/// independent sequence, so work split into streams is schedule independent.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t counter_;
};

/// Hit frequency of {mean of n draws >= mu} over `samples` independent
/// sample means. samples >= 1000. The result depends only on the arguments,
/// never on `threads` (0 = hardware concurrency).
McEstimate mc_tail(const DistributionModel& model, std::int64_t n, double mu,
                   std::int64_t samples, std::uint64_t seed, unsigned threads = 0);

/// 95% Wilson score interval for hits out of trials.
McEstimate wilson_interval(std::int64_t hits, std::int64_t trials);

}  // namespace ldtail
