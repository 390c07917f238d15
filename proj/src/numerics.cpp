#include "ldtail/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ldtail/errors.hpp"

namespace ldtail {

namespace {

constexpr double kInvSqrtPi = 0.564189583547756286948079451560772586;
constexpr double kSqrt1_2 = 0.707106781186547524400844362104849039;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// exp(x^2) with the square split into head and tail so the rounding of x*x
// does not get amplified by the exponential.
double exp_square(double x) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(hi) * std::exp(lo);
}

// Continued fraction for erfcx at large x:
//   sqrt(pi) erfcx(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
// Evaluated with the modified Lentz method.
double erfcx_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    const double a = 0.5 * k;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 0.5 * kEps) break;
  }
  return kInvSqrtPi / f;
}

// lgamma(a) - [(a - 1/2) ln a - a + ln sqrt(2 pi)] from the Stirling series.
// Truncation error below 1e-16 for a >= 10.
double stirling_correction(double a) {
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  // Coefficients B_{2k} / (2k (2k - 1)).
  constexpr double c[] = {1.0 / 12.0,          -1.0 / 360.0,    1.0 / 1260.0,
                          -1.0 / 1680.0,       1.0 / 1188.0,    -691.0 / 360360.0,
                          1.0 / 156.0,         -3617.0 / 122400.0};
  double sum = 0.0;
  for (int k = 7; k >= 0; --k) sum = sum * inv2 + c[k];
  return sum * inv;
}

// ln(x^a e^{-x} / Gamma(a)), the common prefactor of P(a,x) and Q(a,x).
double log_gamma_prefactor(double a, double x) {
  if (a < 10.0) return a * std::log(x) - x - std::lgamma(a);
  // -a (t - 1 - ln t) + 0.5 ln(a / 2 pi) - stirling_correction(a), t = x/a.
  const double t = x / a;
  return a * log1pmx(t - 1.0) + 0.5 * std::log(a) - kLnSqrt2Pi -
         stirling_correction(a);
}

// sum_{k>=0} x^k / (a (a+1) ... (a+k)); P(a,x) = prefactor * series.
double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int k = 0; k < 100000; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) return sum;
  }
  throw ConvergenceError("incomplete gamma series did not converge");
}

// Continued fraction such that Q(a,x) = prefactor * fraction (Lentz).
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma requires a > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma requires x >= 0");
}

}  // namespace

double std_normal_pdf(double z) { return std::exp(log_std_normal_pdf(z)); }

double log_std_normal_pdf(double z) { return -0.5 * z * z - kLnSqrt2Pi; }

double erfcx(double x) {
  if (x < 0.0) throw DomainError("erfcx is only provided for x >= 0");
  if (x < 26.0) return exp_square(x) * std::erfc(x);
  return erfcx_continued_fraction(x);
}

double log_std_normal_cdf(double z) {
  if (std::isnan(z)) return z;
  if (z >= 0.0) {
    // Phi(z) = 1 - erfc(z/sqrt2)/2; the complement is small for large z.
    const double upper = 0.5 * std::erfc(z * kSqrt1_2);
    return std::log1p(-upper);
  }
  if (z >= -1.0) return std::log(0.5 * std::erfc(-z * kSqrt1_2));
  if (z == -std::numeric_limits<double>::infinity()) return z;
  const double x = -z * kSqrt1_2;
  // ln(erfc(x)/2) = ln(erfcx(x)/2) - x^2
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::log(0.5 * erfcx(x)) - hi - lo;
}

FellerBounds feller_bounds(double z) {
  if (!(z > 0.0)) throw DomainError("feller_bounds requires z > 0");
  const double upper = std_normal_pdf(z) / z;
  const double lower = z <= 1.0 ? 0.0 : upper * (1.0 - 1.0 / (z * z));
  return {lower, upper};
}

std::optional<double> log_binomial_coefficient(std::int64_t n, std::int64_t k) {
  if (n < 0) throw DomainError("log_binomial_coefficient requires n >= 0");
  if (k < 0 || k > n) return std::nullopt;
  k = std::min(k, n - k);
  if (k == 0) return 0.0;
  if (n <= 1000) {
    // Multiplicative form stays within a few ulps and far from overflow here.
    double log_sum_terms = 0.0;
    double product = 1.0;
    for (std::int64_t i = 1; i <= k; ++i) {
      product *= static_cast<double>(n - k + i) / static_cast<double>(i);
      if (product > 1e280) {
        log_sum_terms += std::log(product);
        product = 1.0;
      }
    }
    return log_sum_terms + std::log(product);
  }
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

double log_reg_gamma_lower(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return log_gamma_prefactor(a, x) + std::log(gamma_series(a, x));
  const double log_q = log_gamma_prefactor(a, x) + std::log(gamma_continued_fraction(a, x));
  return std::log1p(-std::exp(log_q));
}

double log_reg_gamma_upper(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  if (x < a + 1.0) {
    const double log_p = log_gamma_prefactor(a, x) + std::log(gamma_series(a, x));
    return std::log1p(-std::exp(log_p));
  }
  return log_gamma_prefactor(a, x) + std::log(gamma_continued_fraction(a, x));
}

double log_sum(std::span<const double> terms) {
  if (terms.empty()) throw std::invalid_argument("log_sum of an empty sequence");
  const double top = *std::max_element(terms.begin(), terms.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  if (std::isinf(top) || std::isnan(top)) return top;

  std::vector<double> scaled;
  scaled.reserve(terms.size());
  for (double t : terms) {
    if (std::isnan(t)) return t;
    scaled.push_back(std::exp(t - top));
  }
  std::sort(scaled.begin(), scaled.end());
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : scaled) {
    const double next = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - next) + v;
    } else {
      compensation += (v - next) + sum;
    }
    sum = next;
  }
  return top + std::log(sum + compensation);
}

double log1pmx(double y) {
  if (!(y > -1.0)) {
    if (y == -1.0) return -std::numeric_limits<double>::infinity();
    throw DomainError("log1pmx requires y > -1");
  }
  if (std::abs(y) < 0.25) {
    // -y^2/2 + y^3/3 - ...
    double power = y * y;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      const double term = power / k;
      sum += (k % 2 == 0) ? -term : term;
      if (std::abs(term) < kEps * std::abs(sum)) break;
      power *= y;
    }
    return sum;
  }
  return std::log1p(y) - y;
}

}  // namespace ldtail
