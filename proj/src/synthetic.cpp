#include "msml/synthetic.hpp"

#include <cmath>

#include "msml/posterior.hpp"

namespace msml {

SyntheticData generate(const ModelSpec& spec, const Theta& truth, const GeneratorConfig& config,
                       Rng& rng) {
  spec.validate();
  if (static_cast<int>(config.covariates.size()) != spec.dim)
    throw DimensionError("generator: " + std::to_string(config.covariates.size()) +
                         " covariate samplers for D=" + std::to_string(spec.dim));
  const CovariateSampler& c0 = config.covariates[0];
  if (c0.kind != CovariateSampler::Kind::Constant || c0.a != 1.0)
    throw DimensionError("generator: covariate 0 must be the constant intercept");
  if (config.periods < 1) throw DimensionError("generator: need at least one period");
  if (config.records_per_period < 0 || config.poisson_rate < 0)
    throw DimensionError("generator: negative record count");
  Theta th = truth;
  th.states.assign(static_cast<std::size_t>(config.periods), 0);
  th.validate(spec, config.periods);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SyntheticData out;
  out.states.assign(static_cast<std::size_t>(config.periods), 0);
  if (spec.switching) {
    const StationaryProbs pi = stationary_probs(truth.p01, truth.p10);
    std::uint8_t s = unif(rng) < pi.p1 ? 1 : 0;
    for (int t = 0; t < config.periods; ++t) {
      if (t > 0) {
        const double u = unif(rng);
        s = s == 0 ? (u < truth.p01 ? 1 : 0) : (u < truth.p10 ? 0 : 1);
      }
      out.states[static_cast<std::size_t>(t)] = s;
    }
  }

  std::vector<Record> records;
  std::poisson_distribution<int> poisson(config.poisson_rate > 0 ? config.poisson_rate : 1.0);
  for (int t = 0; t < config.periods; ++t) {
    const int count = config.poisson_rate > 0 ? poisson(rng) : config.records_per_period;
    const Coefficients& beta = truth.beta(out.states[static_cast<std::size_t>(t)]);
    for (int k = 0; k < count; ++k) {
      Record r;
      r.period = t;
      r.x.resize(static_cast<std::size_t>(spec.dim));
      for (std::size_t d = 0; d < r.x.size(); ++d) {
        const CovariateSampler& cs = config.covariates[d];
        switch (cs.kind) {
          case CovariateSampler::Kind::Constant: r.x[d] = cs.a; break;
          case CovariateSampler::Kind::Bernoulli: r.x[d] = unif(rng) < cs.a ? 1.0 : 0.0; break;
          case CovariateSampler::Kind::Uniform: r.x[d] = cs.a + (cs.b - cs.a) * unif(rng); break;
        }
      }
      const auto p = outcome_probs(beta, r.x);
      const double u = unif(rng);
      double acc = 0.0;
      r.outcome = spec.outcomes - 1;
      for (int i = 0; i < spec.outcomes - 1; ++i) {
        acc += p[static_cast<std::size_t>(i)];
        if (u < acc) {
          r.outcome = i;
          break;
        }
      }
      records.push_back(std::move(r));
    }
  }
  out.data = Dataset(config.periods, spec.outcomes, spec.dim, records);
  return out;
}

RecoveryReport recovery_score(const Theta& truth, const PosteriorSample& sample, double level) {
  const ModelSpec& spec = sample.spec;
  if (truth.beta0.rows() != spec.outcomes - 1 || truth.beta0.cols() != spec.dim)
    throw DimensionError("recovery: truth and sample shapes differ");
  if (spec.switching && truth.states.size() != static_cast<std::size_t>(sample.periods))
    throw DimensionError("recovery: truth state vector has wrong length");
  RecoveryReport rep;
  std::size_t hits = 0;
  for (const ParamRef& r : continuous_parameters(spec)) {
    const CredibleInterval ci = credible_interval(sample.pooled(r), level, r.name);
    const double v = param_value(truth, r);
    const bool cov = ci.lower <= v && v <= ci.upper;
    rep.names.push_back(r.name);
    rep.truth.push_back(v);
    rep.lower.push_back(ci.lower);
    rep.upper.push_back(ci.upper);
    rep.covered.push_back(cov);
    hits += cov ? 1 : 0;
  }
  rep.coverage = rep.names.empty() ? 1.0
                                   : static_cast<double>(hits) / static_cast<double>(rep.names.size());
  if (spec.switching) {
    const StateSeries ss = state_series(sample);
    std::size_t right = 0;
    for (std::size_t t = 0; t < ss.prob.size(); ++t)
      right += (std::lround(ss.prob[t]) == truth.states[t]) ? 1 : 0;
    rep.state_accuracy = static_cast<double>(right) / static_cast<double>(ss.prob.size());
  }
  return rep;
}

}  // namespace msml
