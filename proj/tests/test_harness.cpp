#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ldtail/errors.hpp"
#include "ldtail/harness.hpp"

using namespace ldtail;

namespace {

ConvergenceReport synthetic(double slope, double scale) {
  ConvergenceReport report;
  for (std::int64_t n = 10; n <= 1000; n += 10) {
    const double error = scale * std::pow(static_cast<double>(n), slope);
    report.rows.push_back({n, -1.0, -1.0 + std::log1p(error), 1.0 + error, error});
  }
  return report;
}

}  // namespace

TEST_CASE("make_n_grid") {
  CHECK(make_n_grid(10, 30, 10) == std::vector<std::int64_t>{10, 20, 30});
  CHECK(make_n_grid(5, 12, 5) == std::vector<std::int64_t>{5, 10});
  CHECK(make_n_grid(7, 7, 3) == std::vector<std::int64_t>{7});
  CHECK_THROWS_AS(make_n_grid(0, 5, 1), RangeError);
  CHECK_THROWS_AS(make_n_grid(5, 4, 1), RangeError);
  CHECK_THROWS_AS(make_n_grid(1, 4, 0), RangeError);
}

TEST_CASE("fit_error_slope recovers synthetic slopes") {
  CHECK(fit_error_slope(synthetic(-1.0, 0.3)) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fit_error_slope(synthetic(-0.5, 2.0)) == doctest::Approx(-0.5).epsilon(1e-12));
  const auto line = fit_error_line(synthetic(-1.0, 0.3));
  CHECK(line.intercept == doctest::Approx(std::log(0.3)).epsilon(1e-12));
}

TEST_CASE("fit_error_slope needs five usable rows") {
  auto report = synthetic(-1.0, 0.3);
  report.rows.resize(4);
  CHECK_THROWS_AS(fit_error_slope(report), InsufficientDataError);
  report = synthetic(-1.0, 0.3);
  for (std::size_t i = 3; i < report.rows.size(); ++i) report.rows[i].abs_ratio_error = 0.0;
  CHECK_THROWS_AS(fit_error_slope(report), InsufficientDataError);
}

TEST_CASE("run_convergence on Bernoulli") {
  const auto grid = make_n_grid(10, 200, 10);
  const auto report = run_convergence("bernoulli:p=0.5", 0.7, Method::refined_gaussian, grid);
  CHECK(report.rows.size() == grid.size());
  CHECK(report.misaligned_dropped == 0);
  CHECK(report.failed_dropped == 0);
  CHECK(report.monte_carlo_rows == 0);
  CHECK(report.model_spec == "bernoulli:p=0.5");
  CHECK(report.fitted_slope == doctest::Approx(-1.0).epsilon(0.3));
  CHECK(report.slope_note.empty());
  const auto& at100 = report.rows[9];
  CHECK(at100.n == 100);
  CHECK(at100.ratio == doctest::Approx(1.000125).epsilon(1e-5));
}

TEST_CASE("run_convergence drops grid points off the lattice") {
  const auto grid = make_n_grid(5, 60, 1);
  const auto report = run_convergence("bernoulli:p=0.5", 0.7, Method::bahadur_rao, grid);
  CHECK(report.rows.size() == 6);
  CHECK(report.misaligned_dropped == grid.size() - 6);
  for (const auto& row : report.rows) CHECK(row.n % 10 == 0);
}

TEST_CASE("run_convergence counts failed rows") {
  const std::vector<std::int64_t> grid{1, 2, 25, 50, 100, 150, 200, 250};
  const auto report = run_convergence("bernoulli:p=0.5", 0.52, Method::refined_gaussian, grid);
  CHECK(report.misaligned_dropped == 2);
  CHECK(report.failed_dropped == 1);
  CHECK(report.rows.size() == 5);
  CHECK(std::isfinite(report.fitted_slope));
  CHECK_THROWS_AS(run_convergence("bernoulli:p=0.5", 0.52, Method::refined_gaussian,
                                  std::vector<std::int64_t>{25}),
                  ShiftError);
}

TEST_CASE("run_convergence rejects bad grids") {
  CHECK_THROWS_AS(run_convergence("bernoulli:p=0.5", 0.7, Method::sanov, std::vector<std::int64_t>{}),
                  RangeError);
  CHECK_THROWS_AS(run_convergence("bernoulli:p=0.5", 0.7, Method::sanov, std::vector<std::int64_t>{20, 10}),
                  RangeError);
  CHECK_THROWS_AS(run_convergence("bernoulli:p=2", 0.7, Method::sanov, std::vector<std::int64_t>{10}),
                  ParseError);
}

TEST_CASE("run_convergence refuses a slope when Monte Carlo is too noisy") {
  const std::string spec = "pmf:support=0,1,1000;probs=0.4,0.3,0.3";
  ConvergenceOptions options;
  options.mc_samples = 2000;
  options.seed = 9;
  options.threads = 1;
  const auto report = run_convergence(spec, 325.0, Method::refined_gaussian,
                                      std::vector<std::int64_t>{1000}, options);
  CHECK(report.monte_carlo_rows == 1);
  CHECK(std::isnan(report.fitted_slope));
  CHECK_FALSE(report.slope_note.empty());
}

TEST_CASE("table1 reproduction") {
  const auto report = reproduce_table1();
  REQUIRE(report.rows.size() == 7);
  CHECK(report.max_abs_dev_from_paper == doctest::Approx(6.841466524595e-4).epsilon(1e-9));
  CHECK(report.rows[6].c_mu == doctest::Approx(0.53184390084672010771).epsilon(1e-12));
  CHECK(report.bound_holds);
  CHECK(report.linear_rule_max_dev == doctest::Approx(1.49e-3).epsilon(0.02));
  CHECK(report.rows[2].c_mu == doctest::Approx(0.51660361431089401917).epsilon(1e-12));
}

TEST_CASE("csv output") {
  std::ostringstream empty;
  emit_csv(ConvergenceReport{}, empty);
  CHECK(empty.str() == "n,log_exact,log_approx,ratio,abs_ratio_error\n");

  std::ostringstream table;
  emit_csv(reproduce_table1(), table);
  const std::string text = table.str();
  CHECK(text.rfind("mu,c_mu\n0.59999999999999998,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 8);

  std::ostringstream first, second;
  emit_csv(synthetic(-1.0, 0.3), first);
  emit_csv(synthetic(-1.0, 0.3), second);
  CHECK(first.str() == second.str());
}

TEST_CASE("csv files") {
  const auto dir = std::filesystem::temp_directory_path() / "ldtail_harness_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "table1.csv";
  emit_csv(reproduce_table1(), path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "mu,c_mu");
  CHECK_THROWS_AS(emit_csv(reproduce_table1(), dir / "missing" / "x.csv"), IoError);
  std::filesystem::remove_all(dir);
}
