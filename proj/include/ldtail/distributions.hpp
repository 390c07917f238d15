#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ldtail {

struct Bernoulli {
  double p;
};

struct Poisson {
  double lambda;
};

struct Exponential {
  double rate;
};

struct Gaussian {
  double mean;
  double variance;
};

/// Finite-support law: strictly increasing support, positive probabilities
/// summing to one.
struct FinitePmf {
  std::vector<double> support;
  std::vector<double> probabilities;
};

/// The base law P0 of one summand. Construct through the factories, which
/// validate every parameter; a constructed model is always valid.
class DistributionModel {
 public:
  using Kind = std::variant<Bernoulli, Poisson, Exponential, Gaussian, FinitePmf>;

  static DistributionModel bernoulli(double p);
  static DistributionModel poisson(double lambda);
  static DistributionModel exponential(double rate);
  static DistributionModel gaussian(double mean, double variance);
  static DistributionModel finite_pmf(std::vector<double> support,
                                      std::vector<double> probabilities);

  const Kind& kind() const noexcept { return kind_; }

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&kind_);
  }

  /// Canonical specification string, e.g. "bernoulli:p=0.5".
  std::string to_spec() const;

 private:
  explicit DistributionModel(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

/// Open interval (lower, upper) of natural parameters with finite Z(beta).
struct NaturalDomain {
  double lower;
  double upper;

  bool contains(double beta) const noexcept { return beta > lower && beta < upper; }
};

/// Lattice {k * span + offset : k integer} carrying every support point.
struct LatticeInfo {
  double span;
  double offset;
};

/// Range of tilted means; supremum and infimum may be infinite.
struct MeanRange {
  double infimum;
  double base_mean;
  double supremum;

  bool contains(double mu) const noexcept { return mu > infimum && mu < supremum; }
};

/// ln Z, mean and variance of the tilted law P_beta in one pass.
struct TiltedMoments {
  double log_partition;
  double mean;
  double variance;
};

NaturalDomain natural_domain(const DistributionModel& model);

double log_partition(const DistributionModel& model, double beta);
double tilted_mean(const DistributionModel& model, double beta);
double tilted_variance(const DistributionModel& model, double beta);
TiltedMoments tilted_moments(const DistributionModel& model, double beta);

MeanRange mean_range(const DistributionModel& model);

/// Maximal lattice of a lattice-valued model, or nullopt for continuous laws
/// and for finite supports whose gaps have no common divisor within 1e-9.
std::optional<LatticeInfo> lattice_of(const DistributionModel& model);

/// Tolerance on lattice-index integrality used throughout the library.
inline constexpr double kLatticeTolerance = 1e-9;

}  // namespace ldtail
