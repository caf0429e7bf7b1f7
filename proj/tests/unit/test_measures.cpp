#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kcorr/errors.hpp"
#include "kcorr/hdp.hpp"
#include "kcorr/measures.hpp"
#include "oracles.hpp"

using namespace kcorr;

namespace {

DiscreteMeasure two_point() { return DiscreteMeasure(Points::scalars({0.0, 1.0}), {0.5, 0.5}); }

}  // namespace

TEST_CASE("double_integral") {
  const auto g = KernelSpec::gaussian(1.0);
  CHECK(double_integral(g, DiscreteMeasure::dirac(0.3), DiscreteMeasure::dirac(0.3)) == 1.0);
  CHECK(double_integral(g, two_point(), DiscreteMeasure::dirac(0.0)) ==
        doctest::Approx(0.5 * (1.0 + std::exp(-0.5))));
  const auto s = KernelSpec::setwise_interval(0.0, 0.5);
  const DiscreteMeasure mu(Points::scalars({0.1, 0.4, 0.8}), {0.2, 0.3, 0.5});
  const DiscreteMeasure nu(Points::scalars({0.2, 0.6}), {0.25, 0.75});
  CHECK(double_integral(s, mu, nu) == doctest::Approx(0.5 * 0.25));
}

TEST_CASE("diag_minus_double") {
  const auto g = KernelSpec::gaussian(1.0);
  CHECK(diag_minus_double(g, DiscreteMeasure::dirac(0.7)) == 0.0);
  CHECK(diag_minus_double(g, two_point()) == doctest::Approx(0.5 * (1.0 - std::exp(-0.5))));
  const auto s = KernelSpec::setwise_interval(0.0, 0.5);
  const DiscreteMeasure mu(Points::scalars({0.1, 0.4, 0.8}), {0.2, 0.3, 0.5});
  CHECK(diag_minus_double(s, mu) == doctest::Approx(0.5 * 0.5));
  const DiscreteMeasure half(Points::scalars({0.1}), {0.5}, 0.5);
  CHECK_THROWS_AS((void)diag_minus_double(g, half), InputError);
}

TEST_CASE("mc_discretize") {
  Rng rng(5);
  const PointSampler constant = [](Rng&, std::span<double> out) { out[0] = 0.25; };
  const auto d = mc_discretize(constant, 50, 1, rng);
  CHECK(d.size() == 50);
  CHECK(d.total_mass() == doctest::Approx(1.0));
  CHECK(diag_minus_double(KernelSpec::gaussian(1.0), d) == doctest::Approx(0.0).epsilon(1e-15));

  const auto u = mc_discretize(Dist::uniform(0.0, 1.0), 100000, rng);
  const double ref = oracle::unit_square_gauss(1.0);
  CHECK(ref == doctest::Approx(0.9243101032095642).epsilon(1e-12));
  CHECK(std::abs(double_integral(KernelSpec::gaussian(1.0), u, u) - ref) < 5e-3);

  for (double t2 : {0.5, 2.0}) {
    for (double sg : {0.5, 1.0, 2.0}) {
      const auto n = mc_discretize(Dist::normal(0.0, t2), 100000, rng);
      const double expect = 1.0 - std::sqrt(sg * sg / (2 * t2 + sg * sg));
      CHECK(std::abs(diag_minus_double(KernelSpec::gaussian(sg), n) - expect) < 5e-3);
    }
  }
}

TEST_CASE("degeneracy_statistic") {
  const auto g = KernelSpec::gaussian(1.0);
  CHECK(degeneracy_statistic(g, Points::scalars({0.4, 0.4, 0.4})) == 0.0);
  CHECK(degeneracy_statistic(KernelSpec::setwise_interval(0.0, 0.5), Points::scalars({0.1, 0.2, 0.3})) ==
        0.0);
  CHECK(degeneracy_statistic(g, Points::scalars({0.0, 1.0})) == doctest::Approx(dk2(g, 0.0, 1.0) / 2));
  Rng rng(8);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> x(10000);
  for (auto& v : x) v = U(rng);
  CHECK(std::abs(degeneracy_statistic(g, Points::scalars(x)) -
                 2.0 * (1.0 - oracle::unit_square_gauss(1.0))) < 5e-3);
}

TEST_CASE("moments_from_measure_pairs") {
  const auto g = KernelSpec::gaussian(1.0);
  std::vector<MeasurePair> same(20, {two_point(), two_point()});
  CHECK_THROWS_AS((void)moments_from_measure_pairs(g, same), DegenerateVarianceError);

  Rng rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<MeasurePair> shifted;
  for (int t = 0; t < 2000; ++t) {
    const double x = U(rng);
    shifted.emplace_back(DiscreteMeasure::dirac(x), DiscreteMeasure::dirac(x + 1.0));
  }
  CHECK(moments_from_measure_pairs(KernelSpec::linear(0.0, 2.0), shifted).corr ==
        doctest::Approx(1.0).epsilon(1e-9));

  std::vector<double> c;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<MeasurePair> indep;
    for (int t = 0; t < 200; ++t) {
      indep.emplace_back(sample_dp_measure(1.0, Dist::uniform(0, 1), 200, rng),
                         sample_dp_measure(1.0, Dist::uniform(0, 1), 200, rng));
    }
    c.push_back(moments_from_measure_pairs(g, indep).corr);
  }
  double m = 0, ss = 0;
  for (double v : c) m += v / c.size();
  for (double v : c) ss += (v - m) * (v - m);
  CHECK(std::abs(m) <= 3.0 * std::sqrt(ss / (c.size() - 1) / c.size()));
}

TEST_CASE("measure csv round trip") {
  const DiscreteMeasure mu(Points::scalars({0.1, 0.123456789012345678}), {0.3, 0.7});
  std::stringstream ss;
  mu.write_csv(ss);
  const auto back = DiscreteMeasure::read_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back.atoms().scalar(1) == mu.atoms().scalar(1));
  CHECK(back.weights()[0] == 0.3);
}

TEST_CASE("invalid measures") {
  CHECK_THROWS_AS(DiscreteMeasure(Points::scalars({0.1}), {-1.0}), InputError);
  CHECK_THROWS_AS(DiscreteMeasure(Points::scalars({0.1, 0.2}), {1.0}), InputError);
}
