#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ldtail/distributions.hpp"
#include "ldtail/errors.hpp"
#include "ldtail/tilting.hpp"

using namespace ldtail;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// Sup over beta of beta*mu - ln Z(beta) by repeated grid zooming.
double grid_divergence(const DistributionModel& m, double mu) {
  double lo = -60.0, hi = 60.0;
  double best = -1e300;
  double best_beta = 0.0;
  for (int round = 0; round < 40; ++round) {
    const double step = (hi - lo) / 200.0;
    for (int i = 0; i <= 200; ++i) {
      const double beta = lo + i * step;
      const double value = beta * mu - log_partition(m, beta);
      if (value > best) {
        best = value;
        best_beta = beta;
      }
    }
    lo = best_beta - 2.0 * step;
    hi = best_beta + 2.0 * step;
  }
  return best;
}

}  // namespace

TEST_CASE("solve_tilt examples") {
  const auto b = solve_tilt(DistributionModel::bernoulli(0.5), 0.7);
  CHECK(rel_err(b.beta_hat, 0.84729786038720361371) < 1e-14);
  CHECK(rel_err(b.divergence, 0.082282878505051846392) < 1e-14);
  CHECK(rel_err(b.variance, 0.21) < 1e-14);
  CHECK(b.target_mean == 0.7);
  CHECK_FALSE(b.near_base_mean);

  const auto e = solve_tilt(DistributionModel::exponential(1.0), 2.0);
  CHECK(e.beta_hat == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rel_err(e.divergence, 0.30685281944005469058) < 1e-14);
  CHECK(rel_err(e.variance, 4.0) < 1e-14);

  const auto p = solve_tilt(DistributionModel::poisson(1.0), 2.0);
  CHECK(rel_err(p.beta_hat, std::log(2.0)) < 1e-14);
  CHECK(rel_err(p.divergence, 0.38629436111989061883) < 1e-14);
  CHECK(rel_err(p.variance, 2.0) < 1e-14);

  const auto g = solve_tilt(DistributionModel::gaussian(1.0, 4.0), 3.0);
  CHECK(g.beta_hat == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.divergence == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.variance == 4.0);
}

TEST_CASE("solve_tilt at the base mean") {
  const auto s = solve_tilt(DistributionModel::bernoulli(0.3), 0.3);
  CHECK(std::abs(s.beta_hat) < 1e-15);
  CHECK(s.divergence == 0.0);
  CHECK(s.near_base_mean);
  CHECK(solve_tilt(DistributionModel::exponential(2.0), 0.50001).near_base_mean);
}

TEST_CASE("solve_tilt rejects means outside the mean range") {
  CHECK_THROWS_AS(solve_tilt(DistributionModel::bernoulli(0.5), 1.0), RangeError);
  CHECK_THROWS_AS(solve_tilt(DistributionModel::bernoulli(0.5), 0.0), RangeError);
  CHECK_THROWS_AS(solve_tilt(DistributionModel::exponential(1.0), -0.1), RangeError);
  CHECK_THROWS_AS(solve_tilt(DistributionModel::poisson(1.0), 0.0), RangeError);
  CHECK_THROWS_AS(solve_tilt(DistributionModel::finite_pmf({0.0, 1.0, 2.0}, {0.2, 0.3, 0.5}), 2.0),
                  RangeError);
  CHECK_THROWS_AS(solve_tilt(DistributionModel::gaussian(0.0, 1.0), std::nan("")), RangeError);
}

TEST_CASE("generic solver reproduces the closed forms") {
  const std::vector<std::pair<DistributionModel, std::vector<double>>> cases = {
      {DistributionModel::bernoulli(0.5), {0.01, 0.2, 0.5001, 0.7, 0.95, 0.999}},
      {DistributionModel::bernoulli(0.05), {0.001, 0.06, 0.5, 0.9}},
      {DistributionModel::poisson(2.0), {0.05, 1.0, 2.5, 7.0, 30.0}},
      {DistributionModel::exponential(1.5), {0.05, 0.5, 1.0, 4.0, 50.0}},
      {DistributionModel::gaussian(-1.0, 3.0), {-20.0, -2.0, 0.0, 5.0, 40.0}},
  };
  for (const auto& [model, mus] : cases) {
    for (double mu : mus) {
      const auto closed = solve_tilt(model, mu);
      const auto generic = solve_tilt_numeric(model, mu);
      CHECK_MESSAGE(std::abs(closed.beta_hat - generic.beta_hat) <= 1e-10 * std::max(1.0, std::abs(closed.beta_hat)),
                    model.to_spec() << " mu=" << mu);
      CHECK_MESSAGE(std::abs(closed.divergence - generic.divergence) <= 1e-10 * std::max(1.0, closed.divergence),
                    model.to_spec() << " mu=" << mu);
      CHECK_MESSAGE(std::abs(closed.variance - generic.variance) <= 1e-10 * std::max(1.0, closed.variance),
                    model.to_spec() << " mu=" << mu);
    }
  }
}

TEST_CASE("tilted mean at beta_hat returns mu") {
  const auto pmf = DistributionModel::finite_pmf({-2.0, 0.0, 1.0, 4.0, 7.5}, {0.1, 0.3, 0.3, 0.2, 0.1});
  for (double mu = -1.95; mu < 7.45; mu += 0.1) {
    const auto s = solve_tilt(pmf, mu);
    CHECK_MESSAGE(std::abs(tilted_mean(pmf, s.beta_hat) - mu) <= 1e-12 * std::max(1.0, std::abs(mu)),
                  "mu = " << mu);
    CHECK(s.divergence >= 0.0);
  }
}

TEST_CASE("divergence equals the Legendre supremum") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<double> support{0.0};
    std::vector<double> probs;
    for (int i = 0; i < 4; ++i) support.push_back(support.back() + 0.5 + unit(gen));
    double total = 0.0;
    for (int i = 0; i < 5; ++i) {
      probs.push_back(unit(gen));
      total += probs.back();
    }
    for (auto& q : probs) q /= total;
    const auto model = DistributionModel::finite_pmf(support, probs);
    const auto range = mean_range(model);
    for (double frac : {0.1, 0.35, 0.6, 0.9}) {
      const double mu = range.infimum + frac * (range.supremum - range.infimum);
      const auto s = solve_tilt(model, mu);
      CHECK_MESSAGE(std::abs(s.divergence - grid_divergence(model, mu)) <= 1e-9,
                    model.to_spec() << " mu=" << mu);
    }
  }
}

TEST_CASE("divergence is convex and minimal at the base mean") {
  const auto model = DistributionModel::finite_pmf({0.0, 1.0, 3.0}, {0.5, 0.3, 0.2});
  const double base = mean_range(model).base_mean;
  double previous_slope = -1e300;
  for (double mu = 0.1; mu < 2.85; mu += 0.05) {
    const double h = 0.01;
    const double slope = (solve_tilt(model, mu + h).divergence - solve_tilt(model, mu).divergence) / h;
    CHECK(slope > previous_slope);
    previous_slope = slope;
    CHECK(solve_tilt(model, mu).divergence >= solve_tilt(model, base).divergence - 1e-15);
  }
}

TEST_CASE("divergence_derivative matches finite differences") {
  const std::vector<std::pair<DistributionModel, std::pair<double, double>>> cases = {
      {DistributionModel::bernoulli(0.5), {0.55, 0.95}},
      {DistributionModel::poisson(1.0), {1.2, 6.0}},
      {DistributionModel::exponential(1.0), {1.2, 6.0}},
      {DistributionModel::gaussian(0.0, 1.0), {0.2, 5.0}},
      {DistributionModel::finite_pmf({0.0, 1.0, 2.5}, {0.5, 0.3, 0.2}), {0.9, 2.3}},
  };
  for (const auto& [model, span] : cases) {
    for (int i = 0; i < 20; ++i) {
      const double mu = span.first + (span.second - span.first) * i / 19.0;
      const double h = 1e-5 * std::max(1.0, std::abs(mu));
      const double fd = (solve_tilt(model, mu + h).divergence - solve_tilt(model, mu - h).divergence) / (2.0 * h);
      const double exact = divergence_derivative(model, mu);
      CHECK_MESSAGE(rel_err(fd, exact) < 1e-6, model.to_spec() << " mu=" << mu);
    }
  }
}

TEST_CASE("solver handles tilts near the support edge") {
  const auto model = DistributionModel::finite_pmf({0.0, 1.0, 2.0}, {0.98, 0.0199, 0.0001});
  const auto s = solve_tilt(model, 1.999);
  CHECK(s.beta_hat > 10.0);
  CHECK(std::abs(tilted_mean(model, s.beta_hat) - 1.999) < 1e-11);
  const auto low = solve_tilt(model, 1e-4);
  CHECK(low.beta_hat < -5.0);
}
