#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kcorr/errors.hpp"
#include "kcorr/harness.hpp"
#include "kcorr/moments.hpp"
#include "oracles.hpp"

using namespace kcorr;

namespace {

// Four draws from a Chinese restaurant process with concentration 1 over Unif[0,1].
std::array<double, 4> crp4(Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::array<double, 4> v{};
  for (int i = 0; i < 4; ++i) {
    const double u = U(rng) * (1.0 + i);
    v[i] = u < 1.0 ? U(rng) : v[static_cast<int>(u) - 1];
  }
  return v;
}

struct MeanSe {
  double mean, se;
};

MeanSe summarize(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1) / n)};
}

}  // namespace

TEST_CASE("cov_hat by hand at M=2") {
  BlockSet b;
  b.push(0.0, 0.0, 1.0, 1.0);
  b.push(1.0, 1.0, 0.0, 0.0);
  CHECK(cov_hat(KernelSpec::linear(0.0, 2.0), b) == doctest::Approx(0.5));
}

TEST_CASE("constant blocks") {
  BlockSet b;
  for (int t = 0; t < 10; ++t) b.push(0.3, 0.3, 0.3, 0.3);
  const auto k = KernelSpec::gaussian(1.0);
  CHECK(cov_hat(k, b) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(var_hat(k, b, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)corr_hat(k, b), DegenerateVarianceError);
}

TEST_CASE("too few blocks") {
  BlockSet b;
  b.push(0.1, 0.2, 0.3, 0.4);
  CHECK_THROWS_AS((void)cov_hat(KernelSpec::gaussian(1.0), b), InputError);
}

TEST_CASE("hDP prior moments match the set-function form") {
  const HdpParams p{1.0, 1.0, Dist::uniform(0.0, 1.0)};
  const auto k = KernelSpec::gaussian(1.0);
  const double spread = 1.0 - oracle::unit_square_gauss(1.0);
  std::vector<double> cov, v1, v2;
  for (std::uint64_t r = 0; r < 10; ++r) {
    Rng rng = make_rng(41, r);
    const auto b = prior_blocks(p, 100000, rng);
    cov.push_back(cov_hat(k, b));
    v1.push_back(var_hat(k, b, 1));
    v2.push_back(var_hat(k, b, 2));
  }
  const auto c = summarize(cov), a = summarize(v1), d = summarize(v2);
  CHECK(std::abs(c.mean - 0.5 * spread) <= 3 * c.se);
  CHECK(std::abs(a.mean - 0.75 * spread) <= 3 * a.se);
  CHECK(std::abs(d.mean - 0.75 * spread) <= 3 * d.se);
}

TEST_CASE("corr_hat detects equal and independent measures") {
  const auto k = KernelSpec::gaussian(1.0);
  Rng rng(42);
  BlockSet same, indep;
  for (int t = 0; t < 100000; ++t) {
    const auto a = crp4(rng);
    same.push(a[0], a[1], a[2], a[3]);
  }
  CHECK(std::abs(corr_hat(k, same).corr - 1.0) < 0.02);
  std::vector<double> c;
  for (int r = 0; r < 20; ++r) {
    BlockSet b;
    for (int t = 0; t < 5000; ++t) {
      const auto a = crp4(rng), z = crp4(rng);
      b.push(a[0], z[0], a[1], z[1]);
    }
    c.push_back(corr_hat(k, b).corr);
  }
  const auto s = summarize(c);
  CHECK(std::abs(s.mean) <= 3 * s.se);
}

TEST_CASE("hDP prior correlation") {
  const HdpParams p{1.0, 1.0, Dist::uniform(0.0, 1.0)};
  const auto r = prior_corr_sampling(p, KernelSpec::gaussian(1.0), 100000, 3);
  CHECK(std::abs(r.corr - 2.0 / 3.0) < 0.02);
  CHECK(r.corr_valid);
  CHECK(r.cross_path == "gauss_transform");
}

TEST_CASE("swapped blocks exchange the variances") {
  const HdpParams p{1.0, 2.0, Dist::uniform(0.0, 1.0)};
  Rng rng(43);
  const auto b = prior_blocks(p, 500, rng);
  const auto k = KernelSpec::laplace(1.0);
  CHECK(var_hat(k, b.swapped(), 1) == doctest::Approx(var_hat(k, b, 2)));
  CHECK(cov_hat(k, b.swapped()) == doctest::Approx(cov_hat(k, b)));
}

TEST_CASE("estimator CLT check") {
  const HdpParams p{1.0, 1.0, Dist::uniform(0.0, 1.0)};
  const BlockGenerator gen = [&](std::size_t M, Rng& rng) { return prior_blocks(p, M, rng); };
  const auto rep = estimator_clt_check(gen, KernelSpec::gaussian(1.0), {200, 400, 800}, 300, 44);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.slope >= -1.2);
  CHECK(rep.slope <= -0.8);
  for (double r : rep.ratios) {
    CHECK(r >= 0.3);
    CHECK(r <= 0.8);
  }
  const BlockGenerator fixed = [](std::size_t M, Rng&) {
    BlockSet b;
    for (std::size_t t = 0; t < M; ++t) b.push(t % 2 ? 0.1 : 0.9, t % 2 ? 0.2 : 0.7, 0.5, 0.5);
    return b;
  };
  CHECK(estimator_clt_check(fixed, KernelSpec::gaussian(1.0), {10, 20, 40}, 5, 1).degenerate);
}

TEST_CASE("report json carries the raw correlation") {
  CorrelationReport r;
  r.cov = 2.0;
  r.var1 = 1.0;
  r.var2 = 1.0;
  r.finalize();
  CHECK(r.corr == 2.0);
  CHECK(r.out_of_range);
  CHECK(r.to_json().find("\"corr\": 2.0") != std::string::npos);
}
