#include <doctest.h>

#include <cmath>
#include <random>

#include "msml/correlation.hpp"
#include "oracles.hpp"

using namespace msml;

namespace {

std::vector<double> randn(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (double& x : v) x = z(rng);
  return v;
}

std::vector<double> randw(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_SUITE("corr-analysis") {

TEST_CASE("weighted_corr: identical and negated series") {
  std::mt19937_64 rng(1);
  const auto a = randn(50, rng), w = randw(50, rng);
  std::vector<double> neg(a);
  for (double& x : neg) x = -x;
  CHECK(weighted_corr(a, a, w) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(weighted_corr(a, neg, w) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("weighted_corr: three-point hand example") {
  // weights (1,1,2): means a=2.25, b=2.75; cov=4.25/4, var_a=2.75/4, var_b=6.75/4
  const double expect = 4.25 / std::sqrt(2.75 * 6.75);
  CHECK(weighted_corr({1, 2, 3}, {1, 2, 4}, {1, 1, 2}) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(oracle::weighted_corr_ld({1, 2, 3}, {1, 2, 4}, {1, 1, 2}) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("weighted_corr: undefined cases") {
  CHECK_THROWS_AS(weighted_corr({1, 1, 1}, {1, 2, 3}, {1, 1, 1}), DegenerateError);
  CHECK_THROWS_AS(weighted_corr({1, 2, 3}, {1, 2, 3}, {0, 0, 0}), DegenerateError);
  CHECK_THROWS_AS(weighted_corr({1, 2}, {1, 2, 3}, {1, 1}), DimensionError);
  CHECK_THROWS_AS(weighted_corr({1, 2, 3}, {1, 2, 3}, {1, -1, 1}), DimensionError);
}

TEST_CASE("weighted_corr properties: symmetry, affine invariance, Pearson reduction, oracle") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = randn(30, rng), b = randn(30, rng), w = randw(30, rng);
    const double r = weighted_corr(a, b, w);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(std::abs(r - weighted_corr(b, a, w)) < 1e-12);
    CHECK(std::abs(r - oracle::weighted_corr_ld(a, b, w)) < 1e-12);
    std::vector<double> pos(a), negv(a);
    for (double& x : pos) x = 2.5 * x + 7.0;
    for (double& x : negv) x = -0.5 * x + 1.0;
    CHECK(std::abs(weighted_corr(pos, b, w) - r) < 1e-12);
    CHECK(std::abs(weighted_corr(negv, b, w) + r) < 1e-12);
    // uniform weights: ordinary Pearson
    const std::vector<double> ones(30, 1.0), threes(30, 3.0);
    CHECK(std::abs(weighted_corr(a, b, ones) - oracle::weighted_corr_ld(a, b, ones)) < 1e-12);
    CHECK(std::abs(weighted_corr(a, b, ones) - weighted_corr(a, b, threes)) < 1e-12);
  }
}

TEST_CASE("state weights: capped at the median inverse sd, certain periods get the cap") {
  StateSeries s;
  s.prob = {0.1, 0.5, 0.9, 1.0, 0.2};
  s.sd = {0.3, 0.5, 0.3, 0.0, 0.4};
  const auto w = state_weights(s);
  // 1/sd = 3.33, 2, 3.33, inf, 2.5 -> median 3.33
  CHECK(w[0] == doctest::Approx(1 / 0.3));
  CHECK(w[1] == doctest::Approx(2.0));
  CHECK(w[3] == doctest::Approx(1 / 0.3));
  CHECK(w[4] == doctest::Approx(2.5));
  const std::vector<double> ext{1, 2, 3, 4, 5};
  CHECK(weighted_corr(s, ext) == doctest::Approx(oracle::weighted_corr_ld(s.prob, ext, w)).epsilon(1e-12));
}

TEST_CASE("corr_matrix: single series, masks and layout") {
  std::mt19937_64 rng(3);
  StateSeries a, b;
  for (int t = 0; t < 40; ++t) {
    const double p = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    a.prob.push_back(p);
    a.sd.push_back(std::sqrt(p * (1 - p)));
    const double q = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    b.prob.push_back(q);
    b.sd.push_back(std::sqrt(q * (1 - q)));
  }
  const auto single = corr_matrix({{"a", a}}, {});
  REQUIRE(single.values.size() == 1);
  CHECK(single.values[0][0] == 1.0);

  const NamedSeries temp{"temp", randn(40, rng)};
  const auto full = corr_matrix({{"a", a}, {"b", b}}, {temp});
  std::vector<std::size_t> all(40);
  for (std::size_t t = 0; t < 40; ++t) all[t] = t;
  const auto masked = corr_matrix({{"a", a}, {"b", b}}, {temp}, all);
  CHECK(full.values == masked.values);
  CHECK(full.row_names == std::vector<std::string>{"a", "b", "temp"});
  CHECK(full.values[0][1] == doctest::Approx(full.values[1][0]).epsilon(1e-12));

  // seasonal mask equals computing on the sliced series
  std::vector<std::size_t> winter;
  for (std::size_t t = 0; t < 40; t += 2) winter.push_back(t);
  const auto wm = corr_matrix({{"a", a}}, {temp}, winter);
  StateSeries as;
  std::vector<double> ts;
  for (auto t : winter) {
    as.prob.push_back(a.prob[t]);
    as.sd.push_back(a.sd[t]);
    ts.push_back(temp.values[t]);
  }
  // weights are capped using the full-period median, so compare to that
  const auto wfull = state_weights(a);
  std::vector<double> wsub;
  for (auto t : winter) wsub.push_back(wfull[t]);
  CHECK(wm.values[1][0] == doctest::Approx(oracle::weighted_corr_ld(as.prob, ts, wsub)).epsilon(1e-12));
}

TEST_CASE("corr_matrix: planted external driver is recovered") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0, 1);
  const std::size_t T = 208;
  std::vector<double> temp(T);
  StateSeries s;
  for (std::size_t t = 0; t < T; ++t) {
    temp[t] = std::sin(2 * M_PI * static_cast<double>(t) / 52.0) + 0.3 * z(rng);
    // state-1 probability driven by cold weather
    const double p = 1.0 / (1.0 + std::exp(3.0 * temp[t]));
    // posterior probabilities estimated from 500 draws of a state
    int hits = 0;
    for (int k = 0; k < 500; ++k) hits += u(rng) < p;
    const double ph = hits / 500.0;
    s.prob.push_back(ph);
    s.sd.push_back(std::sqrt(ph * (1 - ph)));
  }
  std::vector<double> cold(temp);
  for (double& x : cold) x = -x;
  const auto m = corr_matrix({{"state", s}}, {{"cold", cold}});
  CHECK(m.values[1][0] > 0.5);
}

TEST_CASE("external series helpers") {
  const auto w = weekly_average({1, 2, 3, 4, 5, 6, 7, 8, 10});
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(4.0));
  CHECK(w[1] == doctest::Approx(9.0));
  // distances below 0.25 count as 0.25
  CHECK(harmonic_mean_visibility({0.1, 1.0}) == doctest::Approx(2.0 / (4.0 + 1.0)));
  CHECK(harmonic_mean_visibility({2.0, 2.0}) == doctest::Approx(2.0));
}

}  // TEST_SUITE
