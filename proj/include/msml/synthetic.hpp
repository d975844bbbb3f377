#ifndef MSML_SYNTHETIC_HPP
#define MSML_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "msml/mcmc.hpp"

namespace msml {

struct CovariateSampler {
  enum class Kind { Constant, Bernoulli, Uniform };
  Kind kind = Kind::Constant;
  double a = 1.0;  // constant value, Bernoulli q, or uniform lower bound
  double b = 1.0;  // uniform upper bound

  static CovariateSampler constant(double v = 1.0) { return {Kind::Constant, v, v}; }
  static CovariateSampler bernoulli(double q) { return {Kind::Bernoulli, q, 0.0}; }
  static CovariateSampler uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
};

struct GeneratorConfig {
  int periods = 1;
  // Fixed count per period, or Poisson(rate) when poisson_rate > 0.
  int records_per_period = 0;
  double poisson_rate = 0.0;
  // One sampler per covariate column; column 0 must be constant 1.
  std::vector<CovariateSampler> covariates{CovariateSampler::constant()};
};

struct SyntheticData {
  Dataset data;
  std::vector<std::uint8_t> states;
};

// Draws states from the Markov chain (first state stationary), covariates
// from the column samplers and outcomes from the state's logit model.
// Non-switching specs keep every period in state 0.
SyntheticData generate(const ModelSpec& spec, const Theta& truth, const GeneratorConfig& config,
                       Rng& rng);

struct RecoveryReport {
  std::vector<std::string> names;
  std::vector<double> truth;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> covered;
  double coverage = 0.0;
  double state_accuracy = 1.0;  // 1 for non-switching fits
};

RecoveryReport recovery_score(const Theta& truth, const PosteriorSample& sample,
                              double level = 0.95);

}  // namespace msml

#endif  // MSML_SYNTHETIC_HPP
