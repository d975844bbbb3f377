#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "msml/kernels.hpp"
#include "oracles.hpp"

using namespace msml;

namespace {

Coefficients col(std::initializer_list<double> v) {
  Coefficients b(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) b(i++, 0) = x;
  return b;
}

}  // namespace

TEST_SUITE("data-model") {

TEST_CASE("outcome_probs: equal utilities give the uniform distribution") {
  const std::vector<double> x{1.0};
  const auto p = outcome_probs(Coefficients::Zero(2, 1), x);
  REQUIRE(p.size() == 3);
  for (double v : p) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("outcome_probs: log-ratio coefficients") {
  const std::vector<double> x{1.0};
  const auto p = outcome_probs(col({std::log(2.0), std::log(3.0)}), x);
  CHECK(p[0] == doctest::Approx(2.0 / 6).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(3.0 / 6).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(1.0 / 6).epsilon(1e-14));
}

TEST_CASE("outcome_probs: large utilities do not overflow") {
  const std::vector<double> x{250.0};
  const Coefficients b = col({4.0, 4.0});
  const auto p = outcome_probs(b, x);
  const auto ref = oracle::softmax_ld(b, x);
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(std::isfinite(p[i]));
    CHECK(p[i] == doctest::Approx(static_cast<double>(ref[i])).epsilon(1e-12));
    sum += p[i];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isfinite(log_outcome_prob(b, x, 2)));
  CHECK(log_outcome_prob(b, x, 2) == doctest::Approx(static_cast<double>(std::log(ref[2]))).epsilon(1e-12));
}

TEST_CASE("outcome_probs: dimension mismatch names both sizes") {
  const std::vector<double> x{1.0, 2.0};
  try {
    (void)outcome_probs(Coefficients::Zero(2, 3), x);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("D=3") != std::string::npos);
    CHECK(msg.find('2') != std::string::npos);
  }
}

TEST_CASE("outcome_probs property: shift invariance and normalisation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 3);
  for (int rep = 0; rep < 200; ++rep) {
    Coefficients b(3, 4);
    for (Eigen::Index k = 0; k < b.size(); ++k) b.data()[k] = n(rng);
    std::vector<double> x{1.0, n(rng), n(rng), n(rng)};
    const auto p = outcome_probs(b, x);
    const long double c = n(rng) * 10;
    const auto shifted = oracle::softmax_ld(b, x, c);
    double sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(p[i] > 0.0);
      CHECK(p[i] == doctest::Approx(static_cast<double>(shifted[i])).epsilon(1e-11));
      sum += p[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("stationary_probs examples") {
  auto s = stationary_probs(0.5, 0.5);
  CHECK(s.p0 == 0.5);
  CHECK(s.p1 == 0.5);
  s = stationary_probs(0.151, 0.330);
  CHECK(std::abs(s.p0 - 0.6861) < 1e-4);
  CHECK(std::abs(s.p1 - 0.3139) < 1e-4);
  s = stationary_probs(0.0767, 0.613);
  CHECK(std::abs(s.p0 - 0.8888) < 1e-4);
  CHECK(std::abs(s.p1 - 0.1112) < 1e-4);
  CHECK_THROWS_AS(stationary_probs(0.0, 0.0), DegenerateError);
}

TEST_CASE("stationary_probs property: stationarity equations and ordering") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-6, 1 - 1e-6);
  for (int rep = 0; rep < 1000; ++rep) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const auto s = stationary_probs(a, b);
    CHECK(std::abs(s.p0 + s.p1 - 1.0) < 1e-12);
    CHECK(std::abs(s.p0 * (1 - a) + s.p1 * b - s.p0) < 1e-12);
    CHECK(std::abs(s.p0 * a + s.p1 * (1 - b) - s.p1) < 1e-12);
    CHECK(s.p0 >= s.p1);
  }
}

TEST_CASE("log_likelihood: single Bernoulli term") {
  // P(outcome 0) = 0.75 when beta = ln 3
  const Dataset d(1, 2, 1, {{0, 0, {1.0}}});
  ModelSpec spec = ModelSpec::full(2, 1, false);
  Theta th = Theta::zeros(spec, 1);
  th.beta0(0, 0) = std::log(3.0);
  th.beta1 = th.beta0;
  CHECK(log_likelihood(d, spec, th) == doctest::Approx(std::log(0.75)).epsilon(1e-14));
}

TEST_CASE("log_likelihood: all-zero beta is uniform emission") {
  std::vector<Record> recs;
  for (int n = 0; n < 17; ++n) recs.push_back({n % 3, n % 3, {1.0, 0.1 * n}});
  const Dataset d(3, 3, 2, recs);
  const ModelSpec spec = ModelSpec::full(3, 2, true);
  Theta th = Theta::zeros(spec, 3);
  th.states = {0, 1, 1};
  CHECK(log_likelihood(d, spec, th) == doctest::Approx(17 * std::log(1.0 / 3)).epsilon(1e-13));
}

TEST_CASE("log_likelihood: mixed-state toy agrees with a naive loop") {
  const auto toy = helpers::toy(3, 7);
  const auto sd = helpers::draw(toy, 3);
  Theta th = toy.truth;
  th.states = {0, 1, 0};
  const double ll = log_likelihood(sd.data, toy.spec, th);
  const long double ref = oracle::loglik_naive(sd.data, th.beta0, th.beta1, th.states);
  CHECK(ll == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
}

TEST_CASE("log_likelihood: zero probability yields -inf without throwing") {
  const Dataset d(1, 2, 1, {{0, 1, {1.0}}});
  const ModelSpec spec = ModelSpec::full(2, 1, false);
  Theta th = Theta::zeros(spec, 1);
  th.beta0(0, 0) = std::numeric_limits<double>::infinity();
  th.beta1 = th.beta0;
  double ll = 0;
  CHECK_NOTHROW(ll = log_likelihood(d, spec, th));
  CHECK(ll == -std::numeric_limits<double>::infinity());
}

TEST_CASE("log_likelihood property: equal state coefficients reduce to ML for any S") {
  const auto toy = helpers::toy(12, 9);
  const auto sd = helpers::draw(toy, 4);
  Theta th = toy.truth;
  th.beta1 = th.beta0;
  Theta ml = th;
  const ModelSpec mls = toy.spec.as_nonswitching();
  const double ref = log_likelihood(sd.data, mls, ml);
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    for (auto& s : th.states) s = static_cast<std::uint8_t>(rng() & 1u);
    CHECK(log_likelihood(sd.data, toy.spec, th) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("log_likelihood property: permuting records within a period") {
  const auto toy = helpers::toy(6, 10);
  const auto sd = helpers::draw(toy, 8);
  Theta th = toy.truth;
  th.states = {0, 1, 1, 0, 1, 0};
  auto recs = sd.data.records();
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    for (int t = 0; t < 6; ++t) std::shuffle(recs.begin() + t * 10, recs.begin() + (t + 1) * 10, rng);
    const Dataset shuffled(6, 3, 3, recs);
    CHECK(log_likelihood(shuffled, toy.spec, th) ==
          doctest::Approx(log_likelihood(sd.data, toy.spec, th)).epsilon(1e-13));
  }
}

TEST_CASE("Dataset validation") {
  CHECK_THROWS_AS(Dataset(2, 3, 1, {{2, 0, {1.0}}}), DimensionError);
  CHECK_THROWS_AS(Dataset(2, 3, 1, {{0, 3, {1.0}}}), DimensionError);
  CHECK_THROWS_AS(Dataset(2, 3, 2, {{0, 0, {1.0}}}), DimensionError);
  CHECK_THROWS_AS(Dataset(2, 3, 2, {{0, 0, {0.5, 1.0}}}), DimensionError);
  const Dataset d(4, 2, 1, {{3, 0, {1.0}}, {0, 1, {1.0}}, {3, 1, {1.0}}});
  CHECK(d.size() == 3);
  std::size_t total = 0;
  for (int t = 0; t < 4; ++t) total += d.count_in_period(t);
  CHECK(total == d.size());
  CHECK(d.count_in_period(1) == 0);
  CHECK(d.period(0) == 0);
  CHECK(d.outcome(1) == 0);  // stable within period 3
}

TEST_CASE("ModelSpec and Theta invariants") {
  ModelSpec s = ModelSpec::full(3, 2, true);
  s.set(0, 0, Inclusion::Excluded);
  CHECK_THROWS(s.validate());
  ModelSpec ns = ModelSpec::full(3, 2, false);
  ns.set(1, 1, Inclusion::Specific);
  CHECK_THROWS(ns.validate());

  const ModelSpec sw = ModelSpec::full(3, 2, true);
  Theta th = Theta::zeros(sw, 4);
  th.p01 = 0.6;
  th.p10 = 0.3;
  CHECK_THROWS_AS(th.validate(sw, 4), DegenerateError);
  th.p01 = 0.2;
  CHECK_NOTHROW(th.validate(sw, 4));
  ModelSpec sh = sw;
  sh.set(0, 1, Inclusion::Shared);
  th.beta0(0, 1) = 1.0;
  CHECK_THROWS_AS(th.validate(sh, 4), DimensionError);
  th.beta1(0, 1) = 1.0;
  CHECK_NOTHROW(th.validate(sh, 4));
  sh.set(0, 1, Inclusion::Excluded);
  CHECK_THROWS_AS(th.validate(sh, 4), DimensionError);
}

}  // TEST_SUITE
