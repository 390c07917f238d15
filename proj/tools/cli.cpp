#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ldtail/approximations.hpp"
#include "ldtail/errors.hpp"
#include "ldtail/format.hpp"
#include "ldtail/harness.hpp"
#include "ldtail/model_spec.hpp"
#include "ldtail/oracles.hpp"
#include "ldtail/tilting.hpp"

namespace ldtail::cli {

namespace {

std::vector<Method> methods_from_name(const std::string& name) {
  if (name == "sanov") return {Method::sanov};
  if (name == "br") return {Method::bahadur_rao};
  if (name == "refined") return {Method::refined_gaussian};
  return {Method::sanov, Method::bahadur_rao, Method::refined_gaussian};
}

int cmd_tilt(const std::string& spec, double mu, std::ostream& out) {
  const TiltedSummary s = solve_tilt(parse_model_spec(spec), mu);
  out << "beta_hat=" << format_real(s.beta_hat) << '\n'
      << "divergence=" << format_real(s.divergence) << '\n'
      << "variance=" << format_real(s.variance) << '\n'
      << "log_partition_at_tilt=" << format_real(s.log_partition_at_tilt) << '\n';
  return kExitOk;
}

int cmd_tail(const std::string& spec, double mu, std::int64_t n, const std::string& method,
             std::ostream& out, std::ostream& err) {
  const DistributionModel model = parse_model_spec(spec);
  const TailQuery query = make_tail_query(model, n, mu);
  int status = kExitOk;
  for (const Method m : methods_from_name(method)) {
    try {
      const ApproxResult r = estimate_tail(model, query, m);
      out << to_string(m) << ',' << format_real(r.log_prob) << ',' << format_real(r.prob) << ','
          << (r.c_mu ? format_real(*r.c_mu) : std::string{}) << '\n';
    } catch (const Error& e) {
      err << "error: " << to_string(m) << ": " << e.what() << '\n';
      status = kExitDomain;
    }
  }
  return status;
}

int cmd_oracle(const std::string& spec, double mu, std::int64_t n,
               std::optional<std::int64_t> mc_samples, std::uint64_t seed, unsigned threads,
               std::ostream& out) {
  const DistributionModel model = parse_model_spec(spec);
  if (mc_samples) {
    const McEstimate mc = mc_tail(model, n, mu, *mc_samples, seed, threads);
    out << format_real(std::log(mc.point)) << ',' << format_real(mc.point) << ','
        << format_real(mc.ci_low) << ',' << format_real(mc.ci_high) << '\n';
    return kExitOk;
  }
  if (!has_exact_tail(model, n)) {
    throw UnsupportedModelError("no exact oracle for " + model.to_spec() + " at n = " +
                                std::to_string(n) + "; pass --mc-samples");
  }
  const double log_prob = exact_tail(model, n, mu);
  out << format_real(log_prob) << ',' << format_real(std::exp(log_prob)) << '\n';
  return kExitOk;
}

int cmd_table1(const std::string& csv_path, std::ostream& out, std::ostream& err) {
  const Table1Report report = reproduce_table1();
  std::ostream& summary = csv_path.empty() ? err : out;
  if (csv_path.empty()) {
    emit_csv(report, out);
  } else {
    emit_csv(report, std::filesystem::path(csv_path));
  }
  summary << "max_abs_dev_from_paper=" << format_real(report.max_abs_dev_from_paper) << '\n'
          << "bound_holds=" << (report.bound_holds ? "true" : "false") << '\n'
          << "linear_rule_max_dev=" << format_real(report.linear_rule_max_dev) << '\n';
  return kExitOk;
}

struct ConvergenceArgs {
  std::string model;
  double mu = 0.0;
  std::string method;
  std::int64_t n_start = 0;
  std::int64_t n_stop = 0;
  std::int64_t n_step = 1;
  std::string csv;
  ConvergenceOptions options;
};

int cmd_convergence(const ConvergenceArgs& a, std::ostream& out, std::ostream& err) {
  const auto grid = make_n_grid(a.n_start, a.n_stop, a.n_step);
  const ConvergenceReport report =
      run_convergence(a.model, a.mu, methods_from_name(a.method).front(), grid, a.options);
  std::ostream& summary = a.csv.empty() ? err : out;
  if (a.csv.empty()) {
    emit_csv(report, out);
  } else {
    emit_csv(report, std::filesystem::path(a.csv));
  }
  summary << "fitted_slope=" << format_real(report.fitted_slope) << '\n'
          << "fitted_intercept=" << format_real(report.fitted_intercept) << '\n'
          << "rows=" << report.rows.size() << '\n'
          << "misaligned_dropped=" << report.misaligned_dropped << '\n'
          << "failed_dropped=" << report.failed_dropped << '\n'
          << "monte_carlo_rows=" << report.monte_carlo_rows << '\n';
  if (!report.slope_note.empty()) summary << "note=" << report.slope_note << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Refined large-deviation tail probabilities for i.i.d. sums"};
  app.require_subcommand(1);

  std::string model;
  double mu = 0.0;
  std::int64_t n = 0;

  auto* tilt = app.add_subcommand("tilt", "Solve the tilt at a mean target");
  tilt->add_option("--model", model, "Model spec, e.g. bernoulli:p=0.5")->required();
  tilt->add_option("--mu", mu, "Target mean")->required();

  std::string tail_method = "all";
  auto* tail = app.add_subcommand("tail", "Tail probability estimates");
  tail->add_option("--model", model, "Model spec")->required();
  tail->add_option("--mu", mu, "Threshold on the sample mean")->required();
  tail->add_option("--n", n, "Number of summands")->required();
  tail->add_option("--method", tail_method, "sanov, br, refined or all")
      ->check(CLI::IsMember({"sanov", "br", "refined", "all"}));

  std::optional<std::int64_t> mc_samples;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  auto* oracle = app.add_subcommand("oracle", "Exact or Monte Carlo tail probability");
  oracle->add_option("--model", model, "Model spec")->required();
  oracle->add_option("--mu", mu, "Threshold on the sample mean")->required();
  oracle->add_option("--n", n, "Number of summands")->required();
  oracle->add_option("--mc-samples", mc_samples, "Use Monte Carlo with this many samples");
  oracle->add_option("--seed", seed, "Monte Carlo seed");
  oracle->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string table_csv;
  auto* table1 = app.add_subcommand("table1", "Reproduce the p = 1/2 c_mu table");
  table1->add_option("--csv", table_csv, "Write CSV here instead of stdout");

  ConvergenceArgs conv;
  auto* convergence = app.add_subcommand("convergence", "Error-order study over an n grid");
  convergence->add_option("--model", conv.model, "Model spec")->required();
  convergence->add_option("--mu", conv.mu, "Threshold on the sample mean")->required();
  convergence->add_option("--method", conv.method, "sanov, br or refined")
      ->required()
      ->check(CLI::IsMember({"sanov", "br", "refined"}));
  convergence->add_option("--n-start", conv.n_start, "First n")->required();
  convergence->add_option("--n-stop", conv.n_stop, "Last n (inclusive)")->required();
  convergence->add_option("--n-step", conv.n_step, "Grid step")->required();
  convergence->add_option("--csv", conv.csv, "Write CSV here instead of stdout");
  convergence->add_option("--seed", conv.options.seed, "Monte Carlo seed");
  convergence->add_option("--mc-samples", conv.options.mc_samples,
                          "Monte Carlo samples per grid point for models without exact oracle");
  convergence->add_option("--threads", conv.options.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitDomain;
  }

  try {
    if (*tilt) return cmd_tilt(model, mu, out);
    if (*tail) return cmd_tail(model, mu, n, tail_method, out, err);
    if (*oracle) return cmd_oracle(model, mu, n, mc_samples, seed, threads, out);
    if (*table1) return cmd_table1(table_csv, out, err);
    if (*convergence) return cmd_convergence(conv, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitDomain;
}

}  // namespace ldtail::cli
