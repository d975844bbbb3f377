#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace msml;

TEST_SUITE("synthetic-gen") {

TEST_CASE("fair chain: transition frequencies near one half") {
  const ModelSpec spec = ModelSpec::full(2, 1, true);
  Theta th = Theta::zeros(spec, 10000);
  GeneratorConfig g;
  g.periods = 10000;
  Rng rng = make_rng(1, 0);
  const auto sd = generate(spec, th, g, rng);
  const auto c = count_transitions(sd.states);
  const double n0 = c.n00 + c.n01, n1 = c.n10 + c.n11;
  CHECK(std::abs(c.n01 / n0 - 0.5) < 3 * std::sqrt(0.25 / n0));
  CHECK(std::abs(c.n10 / n1 - 0.5) < 3 * std::sqrt(0.25 / n1));
  CHECK(sd.data.empty());
  CHECK(sd.data.periods() == 10000);
}

TEST_CASE("outcome shares calibrated to 143 / 3369 / 15582") {
  const ModelSpec spec = ModelSpec::full(3, 1, false);
  Theta th = Theta::zeros(spec, 1);
  th.beta0 << std::log(143.0 / 15582), std::log(3369.0 / 15582);
  th.beta1 = th.beta0;
  GeneratorConfig g;
  g.periods = 1;
  g.records_per_period = 19094;
  Rng rng = make_rng(2, 0);
  const auto sd = generate(spec, th, g, rng);
  const auto counts = sd.data.outcome_counts();
  const double N = 19094;
  const double target[3] = {0.0075, 0.176, 0.816};
  const double exact[3] = {143 / N, 3369 / N, 15582 / N};
  for (std::size_t i = 0; i < 3; ++i) {
    const double f = static_cast<double>(counts[i]) / N;
    CHECK(std::abs(f - exact[i]) < 3 * std::sqrt(exact[i] * (1 - exact[i]) / N));
    CHECK(std::abs(f - target[i]) < 0.01);
  }
}

TEST_CASE("zero records per period give a valid empty panel") {
  const auto toy = helpers::toy(7, 0);
  const auto sd = helpers::draw(toy, 3);
  CHECK(sd.data.periods() == 7);
  CHECK(sd.data.size() == 0);
  CHECK(sd.states.size() == 7);
}

TEST_CASE("generate is deterministic and follows the law of large numbers") {
  const auto toy = helpers::toy(4, 5000);
  const auto a = helpers::draw(toy, 9);
  const auto b = helpers::draw(toy, 9);
  CHECK(a.data == b.data);
  CHECK(a.states == b.states);

  // empirical outcome frequencies vs the average model probability
  std::vector<double> expect(3, 0.0);
  for (std::size_t n = 0; n < a.data.size(); ++n) {
    const auto p = outcome_probs(toy.truth.beta(a.states[static_cast<std::size_t>(a.data.period(n))]), a.data.covariates(n));
    for (std::size_t i = 0; i < 3; ++i) expect[i] += p[i];
  }
  const auto counts = a.data.outcome_counts();
  const double N = static_cast<double>(a.data.size());
  for (std::size_t i = 0; i < 3; ++i) {
    const double q = expect[i] / N;
    CHECK(std::abs(static_cast<double>(counts[i]) / N - q) < 3 * std::sqrt(q * (1 - q) / N));
  }
}

TEST_CASE("generate rejects bad configurations") {
  auto toy = helpers::toy(3, 2);
  toy.gen.covariates.pop_back();
  CHECK_THROWS_AS(helpers::draw(toy, 1), DimensionError);
  toy = helpers::toy(3, 2);
  toy.gen.covariates[0] = CovariateSampler::uniform(0, 1);
  CHECK_THROWS_AS(helpers::draw(toy, 1), DimensionError);
}

TEST_CASE("recovery_score: point mass at the truth") {
  const auto toy = helpers::toy(12, 5);
  const auto sd = helpers::draw(toy, 4);
  PosteriorSample s;
  s.spec = toy.spec;
  s.periods = 12;
  s.chains.resize(1);
  Theta th = toy.truth;
  th.states = sd.states;
  for (int k = 0; k < 200; ++k) s.chains[0].draws.push_back({th, 0.0});
  const auto r = recovery_score(th, s);
  CHECK(r.coverage == 1.0);
  CHECK(r.state_accuracy == 1.0);
  CHECK(r.names.size() == continuous_parameters(toy.spec).size());
}

TEST_CASE("recovery_score: independent noise around the truth covers at about the nominal rate") {
  const auto toy = helpers::toy(5, 5);
  Rng rng = make_rng(5, 0);
  std::normal_distribution<double> z;
  int covered = 0, total = 0;
  for (int rep = 0; rep < 200; ++rep) {
    // draws N(truth + e, 1) with e ~ N(0,1): the 95% interval covers the
    // truth exactly when |e| < 1.96
    PosteriorSample s;
    s.spec = toy.spec;
    s.periods = 5;
    s.chains.resize(1);
    Theta centre = toy.truth;
    centre.beta0(0, 0) += z(rng);
    for (int k = 0; k < 400; ++k) {
      Theta th = centre;
      th.beta0(0, 0) += z(rng);
      s.chains[0].draws.push_back({th, 0.0});
    }
    Theta truth = toy.truth;
    truth.states.assign(5, 0);
    const auto r = recovery_score(truth, s);
    covered += r.covered[0];
    ++total;
  }
  const double rate = static_cast<double>(covered) / total;
  MESSAGE("coverage of the noisy-centre sample: " << rate);
  CHECK(rate > 0.88);
}

}  // TEST_SUITE
