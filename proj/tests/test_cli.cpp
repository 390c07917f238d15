#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ldtail");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ldtail::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("tilt prints labelled values") {
  const auto r = invoke({"tilt", "--model", "bernoulli:p=0.5", "--mu", "0.7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("beta_hat=0.84729786038720") == 0);
  CHECK(r.out.find("\ndivergence=0.08228287850505") != std::string::npos);
  CHECK(r.out.find("\nvariance=0.2") != std::string::npos);
  CHECK(r.out.find("\nlog_partition_at_tilt=") != std::string::npos);
}

TEST_CASE("tail prints one line per method") {
  const auto r = invoke({"tail", "--model", "bernoulli:p=0.5", "--mu", "0.7", "--n", "100"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string sanov, br, refined;
  std::getline(lines, sanov);
  std::getline(lines, br);
  std::getline(lines, refined);
  CHECK(sanov.rfind("sanov,-8.228287850505", 0) == 0);
  CHECK(sanov.back() == ',');
  CHECK(br.rfind("bahadur_rao,", 0) == 0);
  CHECK(br.find(",4.06760205576") != std::string::npos);
  CHECK(refined.rfind("refined_gaussian,", 0) == 0);
  CHECK(refined.find(",0.5166036143108") != std::string::npos);

  const auto only = invoke({"tail", "--model", "exponential:rate=1", "--mu", "2", "--n", "10",
                            "--method", "refined"});
  CHECK(only.code == 0);
  CHECK(std::count(only.out.begin(), only.out.end(), '\n') == 1);
}

TEST_CASE("tail reports domain errors with exit code 2") {
  CHECK(invoke({"tail", "--model", "bernoulli:p=0.5", "--mu", "0.3", "--n", "10"}).code == 2);
  const auto bad = invoke({"tail", "--model", "bernoulli:q=0.5", "--mu", "0.7", "--n", "10"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("'q'") != std::string::npos);
  const auto shift = invoke({"tail", "--model", "bernoulli:p=0.5", "--mu", "0.52", "--n", "25"});
  CHECK(shift.code == 2);
  CHECK(shift.out.find("sanov,") == 0);
  CHECK(shift.err.find("refined_gaussian") != std::string::npos);
}

TEST_CASE("oracle exact and Monte Carlo") {
  const auto exact = invoke({"oracle", "--model", "bernoulli:p=0.5", "--mu", "0.7", "--n", "10"});
  CHECK(exact.code == 0);
  CHECK(exact.out.find(",0.171875") != std::string::npos);

  const std::vector<std::string> mc_args{"oracle", "--model", "bernoulli:p=0.5", "--mu", "0.7",
                                         "--n", "10", "--mc-samples", "20000", "--seed", "5"};
  const auto first = invoke(mc_args);
  const auto second = invoke(mc_args);
  CHECK(first.code == 0);
  CHECK(first.out == second.out);
  CHECK(std::count(first.out.begin(), first.out.end(), ',') == 3);
}

TEST_CASE("table1 and convergence") {
  const auto table = invoke({"table1"});
  CHECK(table.code == 0);
  CHECK(table.out.rfind("mu,c_mu\n", 0) == 0);
  CHECK(table.err.find("bound_holds=true") != std::string::npos);

  const auto conv = invoke({"convergence", "--model", "bernoulli:p=0.5", "--mu", "0.7", "--method",
                            "refined", "--n-start", "10", "--n-stop", "100", "--n-step", "10"});
  CHECK(conv.code == 0);
  CHECK(conv.out.rfind("n,log_exact,log_approx,ratio,abs_ratio_error\n", 0) == 0);
  CHECK(conv.err.find("fitted_slope=-") != std::string::npos);
  CHECK(conv.err.find("rows=10") != std::string::npos);
}

TEST_CASE("csv paths and I/O errors") {
  const auto dir = std::filesystem::temp_directory_path() / "ldtail_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "conv.csv").string();
  const auto ok = invoke({"convergence", "--model", "exponential:rate=1", "--mu", "2", "--method",
                          "br", "--n-start", "5", "--n-stop", "50", "--n-step", "5", "--csv", path});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("fitted_slope=") == 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,log_exact,log_approx,ratio,abs_ratio_error");

  const auto io = invoke({"table1", "--csv", (dir / "nope" / "t.csv").string()});
  CHECK(io.code == 3);
  CHECK_FALSE(io.err.empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"tail", "--model", "bernoulli:p=0.5"}).code == 2);
  CHECK(invoke({"tail", "--model", "bernoulli:p=0.5", "--mu", "0.7", "--n", "10", "--method", "x"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}
