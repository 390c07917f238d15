#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ldtail/approximations.hpp"

namespace ldtail {

struct ConvergenceRow {
  std::int64_t n;
  double log_exact;
  double log_approx;
  double ratio;
  double abs_ratio_error;
};

/// Approximation-versus-oracle sweep over an ascending n grid.
struct ConvergenceReport {
  std::string model_spec;
  double mu = 0.0;
  Method method = Method::refined_gaussian;
  std::vector<ConvergenceRow> rows;
  /// Least-squares fit of ln(abs_ratio_error) on ln(n); NaN when unavailable.
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  /// Grid points dropped because n*mu is off the sum lattice.
  std::size_t misaligned_dropped = 0;
  /// Grid points dropped because the oracle or the approximation failed.
  std::size_t failed_dropped = 0;
  /// Rows whose exact value came from Monte Carlo.
  std::size_t monte_carlo_rows = 0;
  /// Empty when the slope was fitted; otherwise why it was not.
  std::string slope_note;
};

struct ConvergenceOptions {
  std::uint64_t seed = 0;
  std::int64_t mc_samples = 10'000'000;
  unsigned threads = 0;
};

struct LineFit {
  double slope;
  double intercept;
};

/// Errors below this are rounding noise and are excluded from slope fits.
inline constexpr double kErrorNoiseFloor = 1e-12;

ConvergenceReport run_convergence(const std::string& model_spec, double mu, Method method,
                                  std::span<const std::int64_t> n_grid,
                                  const ConvergenceOptions& options = {});

/// OLS of ln(abs_ratio_error) on ln(n) over rows above the noise floor.
/// Throws InsufficientDataError with fewer than 5 usable rows.
LineFit fit_error_line(const ConvergenceReport& report);
double fit_error_slope(const ConvergenceReport& report);

struct Table1Row {
  double mu;
  double c_mu;
};

struct Table1Report {
  std::vector<Table1Row> rows;
  double max_abs_dev_from_paper = 0.0;
  bool bound_holds = false;
  double linear_rule_max_dev = 0.0;
};

/// Published c_mu values for p = 1/2 at mu = 0.60, 0.65, ..., 0.90.
inline constexpr double kTable1Mu[] = {0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9};
inline constexpr double kTable1CMu[] = {0.508, 0.512, 0.516, 0.520, 0.524, 0.528, 0.532};

Table1Report reproduce_table1();

void emit_csv(const ConvergenceReport& report, std::ostream& out);
void emit_csv(const Table1Report& report, std::ostream& out);
/// File variants; throw IoError naming the destination.
void emit_csv(const ConvergenceReport& report, const std::filesystem::path& destination);
void emit_csv(const Table1Report& report, const std::filesystem::path& destination);

/// Inclusive arithmetic grid start, start + step, ..., <= stop.
std::vector<std::int64_t> make_n_grid(std::int64_t start, std::int64_t stop, std::int64_t step);

}  // namespace ldtail
