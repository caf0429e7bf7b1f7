#include <doctest.h>

#include <cmath>
#include <map>

#include "kcorr/errors.hpp"
#include "kcorr/harness.hpp"
#include "kcorr/hdp.hpp"

using namespace kcorr;

namespace {

GroupedData groups(std::vector<double> a, std::vector<double> b) {
  return GroupedData{{std::move(a), std::move(b)}};
}

}  // namespace

TEST_CASE("prior_corr_closed") {
  CHECK(prior_corr_closed({1, 1, Dist::uniform(0, 1)}) == 2.0 / 3.0);
  CHECK(prior_corr_closed({2, 3, Dist::uniform(0, 1)}) == doctest::Approx(0.5));
  CHECK(prior_corr_closed({1, 1e-12, Dist::uniform(0, 1)}) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)prior_corr_closed({-1, 1, Dist::uniform(0, 1)}), InputError);
}

TEST_CASE("prior_setwise_moments") {
  const HdpParams p{1, 1, Dist::uniform(0, 1)};
  const auto m = prior_setwise_moments(p, 0.5);
  CHECK(m.var == doctest::Approx(3.0 / 16.0));
  CHECK(m.cov == doctest::Approx(1.0 / 8.0));
  CHECK(m.cov / m.var == doctest::Approx(2.0 / 3.0));
  const auto z = prior_setwise_moments(p, 1e-12);
  CHECK(z.var < 1e-11);
  CHECK(z.cov < 1e-11);
}

TEST_CASE("stirling numbers") {
  for (unsigned n = 1; n <= 10; ++n) {
    CHECK(stirling_unsigned(n, n) == 1);
    std::uint64_t f = 1;
    for (unsigned i = 2; i < n; ++i) f *= i;
    CHECK(stirling_unsigned(n, 1) == f);
  }
  CHECK(stirling_unsigned(3, 2) == 3);
  CHECK(stirling_unsigned(4, 2) == 11);
  CHECK(stirling_unsigned(5, 3) == 35);
  CHECK(log_stirling_unsigned(4, 2) == doctest::Approx(std::log(11.0)));
  CHECK(std::isinf(log_stirling_unsigned(3, 0)));
}

TEST_CASE("predictive_step weights") {
  const HdpParams p{1, 1, Dist::uniform(0, 1)};
  Rng rng(1);
  const HdpState empty;
  for (int i = 0; i < 100; ++i) {
    const auto d = predictive_step(empty, p, 1, rng);
    CHECK(d.table == empty.next_label());
  }

  const HdpState one(groups({0.3}, {}));
  int copy = 0, same_dish = 0, fresh = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto d = predictive_step(one, p, 1, rng);
    if (d.table == one.table(1, 0)) {
      ++copy;
    } else if (d.x == 0.3) {
      ++same_dish;
    } else {
      ++fresh;
    }
  }
  CHECK(std::abs(copy / double(n) - 0.5) < 0.005);
  CHECK(std::abs(same_dish / double(n) - 0.25) < 0.005);
  CHECK(std::abs(fresh / double(n) - 0.25) < 0.005);

  const HdpParams greedy{1e-12, 1, Dist::uniform(0, 1)};
  const HdpState three(groups({0.1, 0.2, 0.3}, {}));
  for (int i = 0; i < 1000; ++i) {
    const double x = predictive_step(three, greedy, 1, rng).x;
    CHECK((x == 0.1 || x == 0.2 || x == 0.3));
  }
}

TEST_CASE("gibbs sweep on two equal observations") {
  const HdpParams p{1, 1, Dist::uniform(0, 1)};
  HdpState s(groups({0.4, 0.4}, {}));
  Rng rng(2);
  int one_table = 0;
  const int sweeps = 200000;
  for (int i = 0; i < sweeps; ++i) {
    gibbs_sweep(s, p, rng);
    one_table += s.ell_total() == 1;
  }
  CHECK(std::abs(one_table / double(sweeps) - 2.0 / 3.0) < 0.01);

  HdpState single(groups({0.7}, {}));
  for (int i = 0; i < 100; ++i) {
    gibbs_sweep(single, p, rng);
    CHECK(single.ell_total() == 1);
  }
}

TEST_CASE("gibbs sweep keeps dishes and invariants") {
  const HdpParams p{2, 1, Dist::uniform(0, 1)};
  Rng rng(3);
  HdpState s(sample_hdp_data(p, 40, 30, rng));
  const auto dishes = s.dishes();
  std::vector<std::size_t> d1;
  for (std::size_t j = 0; j < s.n(1); ++j) d1.push_back(s.dish_of(1, j));
  for (int i = 0; i < 50; ++i) {
    gibbs_sweep(s, p, rng);
    CHECK_NOTHROW(s.check_invariants());
  }
  CHECK(s.dishes() == dishes);
  for (std::size_t j = 0; j < s.n(1); ++j) CHECK(s.dish_of(1, j) == d1[j]);
}

TEST_CASE("enumerate_table_posterior") {
  const HdpParams p{1, 1, Dist::uniform(0, 1)};
  const auto single = enumerate_table_posterior(HdpState(groups({0.1}, {0.2})), p);
  REQUIRE(single.size() == 1);
  CHECK(single.begin()->second == doctest::Approx(1.0));

  const auto two = enumerate_table_posterior(HdpState(groups({0.4, 0.4}, {})), p);
  REQUIRE(two.size() == 2);
  CHECK(two.at({1, 0}) == doctest::Approx(2.0 / 3.0));
  CHECK(two.at({2, 0}) == doctest::Approx(1.0 / 3.0));

  const auto many = enumerate_table_posterior(HdpState(groups({0.1, 0.1, 0.2, 0.2}, {0.1, 0.2, 0.2})), p);
  double total = 0.0;
  for (const auto& [cfg, pr] : many) total += pr;
  CHECK(std::abs(total - 1.0) < 1e-12);

  std::vector<double> big(30, 0.5), other(30, 0.5);
  CHECK_THROWS_AS((void)enumerate_table_posterior(HdpState(groups(big, other)), p, 100), CapacityError);
}

TEST_CASE("state json round trip") {
  const HdpParams p{1, 1, Dist::uniform(0, 1)};
  Rng rng(4);
  HdpState s(sample_hdp_data(p, 8, 5, rng));
  gibbs_sweep(s, p, rng);
  const auto back = HdpState::from_json(s.to_json());
  CHECK(back.values(1) == s.values(1));
  CHECK(back.tables(2) == s.tables(2));
  CHECK(back.table_config() == s.table_config());
}

TEST_CASE("bad table labels are rejected") {
  CHECK_THROWS_AS(HdpState(groups({0.1, 0.2}, {}), {{{0, 0}, {}}}), InputError);
  CHECK_THROWS_AS(HdpState(groups({0.1}, {}), {{{0, 1}, {}}}), InputError);
}

TEST_CASE("sample_posterior_block on an empty state") {
  const HdpParams p{1, 1, Dist::uniform(0, 1)};
  Rng rng(5);
  BlockSet b;
  for (int t = 0; t < 100000; ++t) {
    HdpState s;
    b.push(sample_posterior_block(s, p, rng));
  }
  CHECK(std::abs(corr_hat(KernelSpec::gaussian(1.0), b).corr - 2.0 / 3.0) < 0.02);

  const HdpParams apart{1, 1e6, Dist::uniform(0, 1)};
  BlockSet far;
  for (int t = 0; t < 20000; ++t) {
    HdpState s;
    far.push(sample_posterior_block(s, apart, rng));
  }
  CHECK(std::abs(corr_hat(KernelSpec::gaussian(1.0), far).corr) < 0.05);
}

TEST_CASE("within-block copies occur") {
  const HdpParams p{1, 1, Dist::uniform(0, 1)};
  Rng rng(6);
  HdpState base(groups({0.2, 0.5}, {0.8}));
  int copies = 0;
  for (int t = 0; t < 2000; ++t) {
    HdpState s = base;
    const auto b = sample_posterior_block(s, p, rng);
    copies += b.x11[0] == b.x12[0];
  }
  CHECK(copies > 0);
}

TEST_CASE("hDP data has ties") {
  const HdpParams p{1, 1, Dist::uniform(0, 1)};
  Rng rng(7);
  const auto d = sample_hdp_data(p, 50, 50, rng);
  std::map<double, int> seen;
  for (const auto& g : d.x) {
    for (double v : g) ++seen[v];
  }
  CHECK(seen.size() < 100);
}

TEST_CASE("stick-breaking DP measure") {
  Rng rng(8);
  const auto m = sample_dp_measure(2.0, Dist::uniform(0, 1), 1000, rng);
  CHECK(m.total_mass() == doctest::Approx(1.0));
  CHECK(m.size() <= 1000);
}
