#include <doctest.h>

#include <cmath>

#include "kcorr/errors.hpp"
#include "kcorr/measures.hpp"
#include "kcorr/parametric.hpp"

using namespace kcorr;

namespace {

GroupedData groups(std::vector<double> a, std::vector<double> b) {
  return GroupedData{{std::move(a), std::move(b)}};
}

}  // namespace

TEST_CASE("gauss_posterior") {
  const GaussParams p{1.0, 2.0, 0.3};
  const auto prior = gauss_posterior(groups({}, {}), p);
  CHECK(prior.theta[0] == 0.0);
  CHECK(prior.sigma[0][0] == doctest::Approx(2.0));
  CHECK(prior.sigma[0][1] == doctest::Approx(0.6));

  const auto indep = gauss_posterior(groups({1.0, 2.0}, {0.5}), GaussParams{1.0, 1.0, 0.0});
  CHECK(indep.sigma[0][1] == 0.0);

  // s = tau = 1, rho = 0.5, one observation x = 1 in group 1: condition the joint Gaussian
  // (theta1, theta2, x) with Cov(x) = 2, Cov(theta, x) = (1, 0.5).
  const auto one = gauss_posterior(groups({1.0}, {}), GaussParams{1.0, 1.0, 0.5});
  CHECK(one.theta[0] == doctest::Approx(0.5));
  CHECK(one.theta[1] == doctest::Approx(0.25));
  CHECK(one.sigma[0][0] == doctest::Approx(0.5));
  CHECK(one.sigma[1][1] == doctest::Approx(1.0 - 0.125));
  CHECK(one.sigma[0][1] == doctest::Approx(0.5 - 0.25));
}

TEST_CASE("param_posterior_corr") {
  CHECK(param_posterior_corr(3, 9, {1, 1, 1.0}) == 1.0);
  CHECK(param_posterior_corr(3, 9, {1, 1, 0.0}) == 0.0);
  CHECK(param_posterior_corr(1, 1, {1, 1, 0.5}) == doctest::Approx(0.5 / 1.75));
  const auto post = gauss_posterior(groups({0.3, 0.1}, {1.0, 2.0, 3.0}), {0.7, 1.3, 0.4});
  CHECK(param_posterior_corr(2, 3, {0.7, 1.3, 0.4}) ==
        doctest::Approx(post.sigma[0][1] / std::sqrt(post.sigma[0][0] * post.sigma[1][1])));
}

TEST_CASE("gauss_variance_identity") {
  CHECK(gauss_variance_identity(1.0, 1.0, 0.0) == 0.0);
  CHECK(gauss_variance_identity(1.0, 1.0, 1.0) == doctest::Approx(1.0 - std::sqrt(1.0 / 3.0)));
  CHECK(gauss_variance_identity(3.0, 1.0, 1.0) == doctest::Approx(3.0 * (1.0 - std::sqrt(1.0 / 3.0))));
  Rng rng(1);
  const auto m = mc_discretize(Dist::normal(0.0, 1.0), 100000, rng);
  CHECK(std::abs(diag_minus_double(KernelSpec::gaussian(1.0), m) - (1.0 - std::sqrt(1.0 / 3.0))) < 5e-3);
}

TEST_CASE("kernel_corr_gauss_prior") {
  CHECK(kernel_corr_gauss_prior({1, 1, 1.0}, 1.0) == doctest::Approx(1.0));
  CHECK(kernel_corr_gauss_prior({1, 1, 0.0}, 1.0) == doctest::Approx(0.0).scale(1.0));
  const double expect = (std::sqrt(0.25) - std::sqrt(0.2)) / (std::sqrt(1.0 / 3.0) - std::sqrt(0.2));
  CHECK(kernel_corr_gauss_prior({1, 1, 0.5}, 1.0) == doctest::Approx(expect));
}

TEST_CASE("calibration") {
  CalibrationTarget t;
  t.v = 0.25;
  t.t2 = 2.0;
  CHECK(t.sigma_star() == doctest::Approx(6.0 / std::sqrt(7.0)));
  CHECK(t.resolved_sigma() == doctest::Approx(6.0 / std::sqrt(14.0)));
  t.xi = 1.0;
  CHECK(calibrate_gaussian(t).params.rho == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)calibrate_hdp(t), FeasibilityError);
  t.sigma = 3.0;
  CHECK_THROWS_AS((void)calibrate_gaussian(t), FeasibilityError);

  double prev = 0.0;
  for (double xi = 0.1; xi < 0.95; xi += 0.1) {
    CalibrationTarget g;
    g.xi = xi;
    const double c = calibrate_hdp(g).c;
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("gauss_predictive_sample") {
  const GaussParams p{0.5, 1.5, 0.6};
  Rng rng(2);
  const auto none = gauss_predictive_sample(groups({}, {}), p, 1, 100000, rng);
  double m = 0, v = 0;
  for (double x : none) m += x / none.size();
  for (double x : none) v += (x - m) * (x - m) / (none.size() - 1);
  CHECK(std::abs(m) < 4 * std::sqrt(2.0 / 1e5));
  CHECK(std::abs(v / 2.0 - 1.0) < 0.05);

  const auto data = groups({1.0, 1.5, 2.0}, {-1.0});
  const auto post = gauss_posterior(data, p);
  const auto s = gauss_predictive_sample(data, p, 1, 100000, rng);
  m = v = 0;
  for (double x : s) m += x / s.size();
  for (double x : s) v += (x - m) * (x - m) / (s.size() - 1);
  const double var = p.s2 + post.sigma[0][0];
  CHECK(std::abs(m - post.theta[0]) < 4 * std::sqrt(var / 1e5));
  CHECK(std::abs(v / var - 1.0) < 0.05);
  CHECK_THROWS_AS((void)gauss_predictive_sample(data, p, 3, 1, rng), InputError);
}

TEST_CASE("invalid gaussian parameters") {
  CHECK_THROWS_AS((void)param_posterior_corr(1, 1, {0.0, 1, 0.5}), InputError);
  CHECK_THROWS_AS((void)param_posterior_corr(1, 1, {1, 1, 1.5}), InputError);
}
