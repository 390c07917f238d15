#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace ldtail {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kLnSqrt2Pi = 0.918938533204672741780329736405617640;

/// Bounds on the standard normal upper tail Phi(-z) for z > 0:
///   phi(z)/z * (1 - 1/z^2) <= Phi(-z) <= phi(z)/z.
/// The lower bound is clamped to 0 for z <= 1.
struct FellerBounds {
  double lower;
  double upper;
};

double std_normal_pdf(double z);
double log_std_normal_pdf(double z);

/// ln Phi(z). Relative error on Phi below 1e-12 for |z| <= 8 and on ln Phi
/// below 1e-10 far into the lower tail, where Phi itself underflows.
double log_std_normal_cdf(double z);

/// exp(x^2) * erfc(x) for x >= 0.
double erfcx(double x);

FellerBounds feller_bounds(double z);

/// ln C(n, k), or nullopt when the coefficient is zero (k < 0 or k > n).
std::optional<double> log_binomial_coefficient(std::int64_t n, std::int64_t k);

/// ln of the regularized incomplete gamma functions P(a, x) and Q(a, x).
/// Series for x < a + 1, continued fraction otherwise.
double log_reg_gamma_lower(double a, double x);
double log_reg_gamma_upper(double a, double x);

/// ln(sum_i exp(terms[i])). Terms are accumulated smallest first with
/// Neumaier compensation after shifting by the maximum. -inf entries are
/// allowed and contribute nothing. Throws std::invalid_argument on empty input.
double log_sum(std::span<const double> terms);

/// log(1 + y) - y, accurate near y = 0.
double log1pmx(double y);

}  // namespace ldtail
