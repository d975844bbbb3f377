#ifndef MSML_TESTS_HELPERS_HPP
#define MSML_TESTS_HELPERS_HPP

#include <cmath>
#include <numeric>
#include <vector>

#include "msml/synthetic.hpp"

namespace helpers {

// Three outcomes, covariates (1, Bernoulli(0.5), U[-1,1]); strongly
// different coefficients in the two states.
struct Toy {
  msml::ModelSpec spec;
  msml::Theta truth;
  msml::GeneratorConfig gen;
};

inline Toy toy(int periods, int per_period, bool switching = true) {
  Toy t;
  t.spec = msml::ModelSpec::full(3, 3, switching);
  t.truth = msml::Theta::zeros(t.spec, periods);
  t.truth.beta0 << -0.5, 0.8, -0.6,
                   0.4, -0.5, 0.7;
  if (switching) {
    t.truth.beta1 << 0.7, -0.6, 0.5,
                     -0.6, 0.7, -0.8;
    t.truth.p01 = 0.2;
    t.truth.p10 = 0.35;
  } else {
    t.truth.beta1 = t.truth.beta0;
  }
  t.gen.periods = periods;
  t.gen.records_per_period = per_period;
  t.gen.covariates = {msml::CovariateSampler::constant(), msml::CovariateSampler::bernoulli(0.5),
                      msml::CovariateSampler::uniform(-1, 1)};
  return t;
}

inline msml::SyntheticData draw(const Toy& t, std::uint64_t seed) {
  msml::Rng rng = msml::make_rng(seed, 99);
  msml::Theta th = t.truth;
  th.states.assign(t.spec.switching ? static_cast<std::size_t>(t.gen.periods) : 0, 0);
  return msml::generate(t.spec, th, t.gen, rng);
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double var(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Monte Carlo standard error of the mean by non-overlapping batch means.
inline double batch_se(const std::vector<double>& v, std::size_t batches = 50) {
  const std::size_t len = v.size() / batches;
  std::vector<double> m;
  for (std::size_t b = 0; b < batches; ++b)
    m.push_back(std::accumulate(v.begin() + static_cast<long>(b * len), v.begin() + static_cast<long>((b + 1) * len), 0.0) /
                static_cast<double>(len));
  return std::sqrt(var(m) / static_cast<double>(batches));
}

}  // namespace helpers

#endif  // MSML_TESTS_HELPERS_HPP
