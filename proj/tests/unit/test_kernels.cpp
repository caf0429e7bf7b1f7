#include <doctest.h>

#include <cmath>

#include "kcorr/errors.hpp"
#include "kcorr/kernels.hpp"

using namespace kcorr;

TEST_CASE("eval basics") {
  const auto g = KernelSpec::gaussian(1.0);
  CHECK(eval(g, 0.0, 0.0) == 1.0);
  CHECK(eval(g, 0.0, 1.0) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
  CHECK(eval(KernelSpec::setwise_interval(0.0, 0.5), 0.2, 0.7) == 0.0);
  CHECK(eval(KernelSpec::setwise_interval(0.0, 0.5), 0.2, 0.4) == 1.0);
  CHECK(eval(KernelSpec::laplace(2.0), 0.0, 1.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(eval(KernelSpec::linear(-2.0, 2.0), 1.5, -1.0) == -1.5);
}

TEST_CASE("half-open set boundary") {
  const auto s = KernelSpec::setwise_interval(0.0, 0.95);
  CHECK(eval(s, 0.0, 0.0) == 1.0);
  CHECK(eval(s, 0.95, 0.95) == 0.0);
}

TEST_CASE("linear kernel rejects points outside its domain") {
  const auto k = KernelSpec::linear(0.0, 1.0);
  CHECK_THROWS_AS((void)eval(k, 0.5, 1.5), InputError);
  CHECK(k.bound() == 1.0);
}

TEST_CASE("dk2") {
  const auto g = KernelSpec::gaussian(1.0);
  CHECK(dk2(g, 0.3, 0.3) == 0.0);
  CHECK(dk2(g, 0.0, 1.0) == doctest::Approx(2.0 * (1.0 - std::exp(-0.5))));
  const auto s = KernelSpec::setwise_interval(0.0, 0.5);
  CHECK(dk2(s, 0.1, 0.7) == 1.0);
  CHECK(dk2(s, 0.1, 0.2) == 0.0);
  CHECK(dk2(s, 0.6, 0.7) == 0.0);
}

TEST_CASE("mixture_updated_gaussian") {
  const auto k = mixture_updated_gaussian(1.0, 1.0);
  CHECK(k.amplitude() == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(k.lengthscale2() == doctest::Approx(3.0));
  CHECK(eval(k, 0.4, 0.4) == doctest::Approx(std::sqrt(1.0 / 3.0)));
  const auto tiny = mixture_updated_gaussian(1e-9, 0.8);
  CHECK(eval(tiny, 0.1, 0.9) == doctest::Approx(eval(KernelSpec::gaussian(0.8), 0.1, 0.9)));
}

TEST_CASE("mixture_kernel_mc") {
  const auto base = KernelSpec::gaussian(1.0);
  Rng rng(3);
  const double x1 = 0.2, x2 = 0.9;
  CHECK(mixture_kernel_mc(base, dirac_sampler(), 7, PointView(&x1, 1), PointView(&x2, 1), rng) ==
        eval(base, x1, x2));
  const double z = 0.0;
  const double est =
      mixture_kernel_mc(base, normal_location_sampler(1.0), 100000, PointView(&z, 1),
                        PointView(&z, 1), rng);
  CHECK(std::abs(est - std::sqrt(1.0 / 3.0)) < 0.01);
  CHECK(est <= base.bound());
}

TEST_CASE("kernel text round trip") {
  for (const char* text : {"gaussian:sigma=1", "laplace:beta=0.5", "linear:domain=[-2,2]",
                           "setwise:a=0,b=0.95", "mixgauss:s0=1,sigma=1"}) {
    CAPTURE(text);
    const auto k = KernelSpec::parse(text);
    CHECK(KernelSpec::parse(k.to_string()).to_string() == k.to_string());
  }
  CHECK(KernelSpec::parse("setwise:a=0,b=0.95").to_string() == "setwise:a=0,b=0.95");
  const auto mc = KernelSpec::parse("mixmc:family=normal,s0=1,L=64,seed=7|gaussian:sigma=1");
  CHECK(mc.kind() == KernelKind::mixture_mc);
  CHECK(mc.mc_draws() == 64);
  CHECK_THROWS_AS((void)KernelSpec::parse("gaussian:sigma=-1"), InputError);
  CHECK_THROWS_AS((void)KernelSpec::parse("bogus:x=1"), InputError);
}

TEST_CASE("mixture_mc kernel is symmetric and bounded") {
  const auto k = KernelSpec::mixture_mc(KernelSpec::gaussian(1.0), MixtureFamily::normal, 0.5, 16, 1);
  CHECK(eval(k, 0.1, 0.7) == eval(k, 0.7, 0.1));
  CHECK(eval(k, 0.3, 0.3) <= k.bound());
}
