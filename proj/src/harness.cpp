#include "ldtail/harness.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>

#include "ldtail/errors.hpp"
#include "ldtail/format.hpp"
#include "ldtail/model_spec.hpp"
#include "ldtail/oracles.hpp"

namespace ldtail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_grid(std::span<const std::int64_t> n_grid) {
  if (n_grid.empty()) throw RangeError("the n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw RangeError("n grid values must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw RangeError("the n grid must be ascending");
  }
}

template <class Report>
void write_file(const Report& report, const std::filesystem::path& destination) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + destination.string() + "' for writing");
  emit_csv(report, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + destination.string() + "'");
}

}  // namespace

std::vector<std::int64_t> make_n_grid(std::int64_t start, std::int64_t stop, std::int64_t step) {
  if (start < 1 || step < 1 || stop < start) {
    throw RangeError("n grid needs 1 <= start <= stop and step >= 1");
  }
  std::vector<std::int64_t> grid;
  for (std::int64_t n = start; n <= stop; n += step) grid.push_back(n);
  return grid;
}

ConvergenceReport run_convergence(const std::string& model_spec, double mu, Method method,
                                  std::span<const std::int64_t> n_grid,
                                  const ConvergenceOptions& options) {
  validate_grid(n_grid);
  const DistributionModel model = parse_model_spec(model_spec);

  ConvergenceReport report;
  report.model_spec = model.to_spec();
  report.mu = mu;
  report.method = method;

  std::exception_ptr first_failure;
  bool mc_too_noisy = false;
  for (const std::int64_t n : n_grid) {
    if (!on_sum_lattice(model, n, mu)) {
      ++report.misaligned_dropped;
      continue;
    }
    try {
      const ApproxResult approx = estimate_tail(model, make_tail_query(model, n, mu), method);
      double log_exact = 0.0;
      if (has_exact_tail(model, n)) {
        log_exact = exact_tail(model, n, mu);
      } else {
        const McEstimate mc = mc_tail(model, n, mu, options.mc_samples,
                                      options.seed + static_cast<std::uint64_t>(n),
                                      options.threads);
        if (mc.point == 0.0) throw InsufficientDataError("Monte Carlo observed no hits");
        log_exact = std::log(mc.point);
        ++report.monte_carlo_rows;
        const double measured_error = std::abs(std::exp(approx.log_prob) - mc.point);
        if (mc.ci_high - mc.ci_low > 0.5 * measured_error) mc_too_noisy = true;
      }
      if (!std::isfinite(log_exact)) throw RangeError("exact tail is zero at this n");
      const double log_ratio = approx.log_prob - log_exact;
      report.rows.push_back(
          {n, log_exact, approx.log_prob, std::exp(log_ratio), std::abs(std::expm1(log_ratio))});
    } catch (const Error&) {
      ++report.failed_dropped;
      if (!first_failure) first_failure = std::current_exception();
    }
  }
  if (report.rows.empty() && first_failure) std::rethrow_exception(first_failure);

  report.fitted_slope = kNaN;
  report.fitted_intercept = kNaN;
  if (mc_too_noisy) {
    report.slope_note = "Monte Carlo interval wider than half the measured error";
    return report;
  }
  try {
    const LineFit fit = fit_error_line(report);
    report.fitted_slope = fit.slope;
    report.fitted_intercept = fit.intercept;
  } catch (const InsufficientDataError& e) {
    report.slope_note = e.what();
  }
  return report;
}

LineFit fit_error_line(const ConvergenceReport& report) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (const auto& row : report.rows) {
    if (!(row.abs_ratio_error > kErrorNoiseFloor)) continue;
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.abs_ratio_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 5) {
    throw InsufficientDataError("slope fit needs at least 5 rows above the noise floor, have " +
                                std::to_string(count));
  }
  const auto m = static_cast<double>(count);
  const double denom = m * sxx - sx * sx;
  if (!(denom > 0.0)) throw InsufficientDataError("slope fit needs at least two distinct n");
  const double slope = (m * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / m};
}

double fit_error_slope(const ConvergenceReport& report) { return fit_error_line(report).slope; }

Table1Report reproduce_table1() {
  Table1Report report;
  for (std::size_t i = 0; i < std::size(kTable1Mu); ++i) {
    const double c = binomial_c_mu(0.5, kTable1Mu[i]);
    report.rows.push_back({kTable1Mu[i], c});
    report.max_abs_dev_from_paper =
        std::max(report.max_abs_dev_from_paper, std::abs(c - kTable1CMu[i]));
  }
  report.bound_holds = true;
  for (int k = 505; k <= 995; k += 5) {
    const double c = binomial_c_mu(0.5, k / 1000.0);
    report.bound_holds = report.bound_holds && c > 0.5 && c < 0.534;
  }
  for (int k = 600; k <= 900; k += 5) {
    const double mu = k / 1000.0;
    const double rule = 0.5 + (mu - 0.5) / 12.0;
    report.linear_rule_max_dev =
        std::max(report.linear_rule_max_dev, std::abs(binomial_c_mu(0.5, mu) - rule));
  }
  return report;
}

void emit_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "n,log_exact,log_approx,ratio,abs_ratio_error\n";
  for (const auto& row : report.rows) {
    out << row.n << ',' << format_real(row.log_exact) << ',' << format_real(row.log_approx) << ','
        << format_real(row.ratio) << ',' << format_real(row.abs_ratio_error) << '\n';
  }
}

void emit_csv(const Table1Report& report, std::ostream& out) {
  out << "mu,c_mu\n";
  for (const auto& row : report.rows) {
    out << format_real(row.mu) << ',' << format_real(row.c_mu) << '\n';
  }
}

void emit_csv(const ConvergenceReport& report, const std::filesystem::path& destination) {
  write_file(report, destination);
}

void emit_csv(const Table1Report& report, const std::filesystem::path& destination) {
  write_file(report, destination);
}

}  // namespace ldtail
