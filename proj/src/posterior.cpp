#include "msml/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace msml {

namespace {

constexpr std::size_t kMinDraws = 100;

void require_draws(const PosteriorSample& sample) {
  if (sample.total_draws() < kMinDraws)
    throw SampleSizeError("need at least " + std::to_string(kMinDraws) + " pooled draws, have " +
                          std::to_string(sample.total_draws()));
}

bool contains_zero(const CredibleInterval& ci) { return ci.lower <= 0.0 && 0.0 <= ci.upper; }

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw SampleSizeError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

CredibleInterval credible_interval(std::vector<double> draws, double level, std::string name) {
  if (draws.empty()) throw SampleSizeError("credible interval of empty sample");
  CredibleInterval ci;
  ci.name = std::move(name);
  ci.level = level;
  ci.mean = mean_of(draws);
  std::sort(draws.begin(), draws.end());
  const double a = 1.0 - level;
  ci.lower = quantile_sorted(draws, a / 2.0);
  ci.upper = quantile_sorted(draws, 1.0 - a / 2.0);
  return ci;
}

std::vector<CredibleInterval> summarize(const PosteriorSample& sample, double level) {
  require_draws(sample);
  std::vector<CredibleInterval> out;
  for (const ParamRef& r : continuous_parameters(sample.spec))
    out.push_back(credible_interval(sample.pooled(r), level, r.name));
  return out;
}

CredibleInterval difference_interval(const PosteriorSample& sample, int outcome, int covariate,
                                     double level) {
  require_draws(sample);
  std::vector<double> diff;
  diff.reserve(sample.total_draws());
  for (const auto& c : sample.chains)
    for (const auto& d : c.draws)
      diff.push_back(d.theta.beta0(outcome, covariate) - d.theta.beta1(outcome, covariate));
  return credible_interval(std::move(diff), level,
                           "beta0-beta1[" + std::to_string(outcome + 1) + "," +
                               std::to_string(covariate) + "]");
}

std::array<CredibleInterval, 2> stationary_intervals(const PosteriorSample& sample, double level) {
  require_draws(sample);
  std::vector<double> p0, p1;
  for (const auto& c : sample.chains)
    for (const auto& d : c.draws) {
      const StationaryProbs s = stationary_probs(d.theta.p01, d.theta.p10);
      p0.push_back(s.p0);
      p1.push_back(s.p1);
    }
  return {credible_interval(std::move(p0), level, "p0bar"),
          credible_interval(std::move(p1), level, "p1bar")};
}

StateSeries state_series(const PosteriorSample& sample) {
  StateSeries ss;
  const auto T = static_cast<std::size_t>(sample.periods);
  ss.prob.assign(T, 0.0);
  ss.sd.assign(T, 0.0);
  const double n = static_cast<double>(sample.total_draws());
  if (n == 0) return ss;
  for (const auto& c : sample.chains)
    for (const auto& d : c.draws)
      for (std::size_t t = 0; t < T; ++t) ss.prob[t] += d.theta.states[t];
  for (double& p : ss.prob) p /= n;
  for (const auto& c : sample.chains)
    for (const auto& d : c.draws)
      for (std::size_t t = 0; t < T; ++t) {
        const double e = d.theta.states[t] - ss.prob[t];
        ss.sd[t] += e * e;
      }
  for (double& v : ss.sd) v = std::sqrt(v / n);
  return ss;
}

Theta posterior_mean(const PosteriorSample& sample) {
  if (sample.total_draws() == 0) throw SampleSizeError("posterior mean of empty sample");
  Theta th = Theta::zeros(sample.spec, sample.periods);
  for (const ParamRef& r : continuous_parameters(sample.spec)) {
    const double m = mean_of(sample.pooled(r));
    switch (r.kind) {
      case ParamRef::Kind::Beta:
        if (r.shared) {
          th.beta0(r.outcome, r.covariate) = m;
          th.beta1(r.outcome, r.covariate) = m;
        } else {
          th.beta(r.state)(r.outcome, r.covariate) = m;
        }
        break;
      case ParamRef::Kind::P01: th.p01 = m; break;
      case ParamRef::Kind::P10: th.p10 = m; break;
    }
  }
  if (sample.spec.switching) {
    const StateSeries ss = state_series(sample);
    for (std::size_t t = 0; t < ss.prob.size(); ++t) th.states[t] = ss.prob[t] > 0.5 ? 1 : 0;
  } else {
    th.beta1 = th.beta0;
  }
  return th;
}

std::array<std::vector<double>, 2> averaged_outcome_probs(const PosteriorSample& sample,
                                                          const Dataset& data) {
  const Theta th = posterior_mean(sample);
  const auto I = static_cast<std::size_t>(data.outcomes());
  std::array<std::vector<double>, 2> avg{std::vector<double>(I, 0.0), std::vector<double>(I, 0.0)};
  if (data.empty()) return avg;
  for (std::size_t n = 0; n < data.size(); ++n)
    for (int s = 0; s < 2; ++s) {
      const auto p = outcome_probs(th.beta(s), data.covariates(n));
      for (std::size_t i = 0; i < I; ++i) avg[static_cast<std::size_t>(s)][i] += p[i];
    }
  for (auto& v : avg)
    for (double& x : v) x /= static_cast<double>(data.size());
  return avg;
}

ModelSpec restrict_spec(const ModelSpec& spec, const PosteriorSample& sample, double a) {
  require_draws(sample);
  const double level = 1.0 - a;
  ModelSpec out = spec;
  auto value_ci = [&](int state, int i, int d) {
    ParamRef r{ParamRef::Kind::Beta, state, i, d, false, ""};
    return credible_interval(sample.pooled(r), level);
  };
  for (int i = 0; i < spec.outcomes - 1; ++i)
    for (int d = 0; d < spec.dim; ++d) {
      const bool intercept = d == 0;
      switch (spec.at(i, d)) {
        case Inclusion::Excluded: break;
        case Inclusion::Shared:
          if (!intercept && contains_zero(value_ci(0, i, d))) out.set(i, d, Inclusion::Excluded);
          break;
        case Inclusion::State0Only:
          if (contains_zero(value_ci(0, i, d))) out.set(i, d, Inclusion::Excluded);
          break;
        case Inclusion::State1Only:
          if (contains_zero(value_ci(1, i, d))) out.set(i, d, Inclusion::Excluded);
          break;
        case Inclusion::Specific: {
          const bool z0 = !intercept && contains_zero(value_ci(0, i, d));
          const bool z1 = !intercept && contains_zero(value_ci(1, i, d));
          if (z0 && z1)
            out.set(i, d, Inclusion::Excluded);
          else if (z0)
            out.set(i, d, Inclusion::State1Only);
          else if (z1)
            out.set(i, d, Inclusion::State0Only);
          else if (contains_zero(difference_interval(sample, i, d, level)))
            out.set(i, d, Inclusion::Shared);
          break;
        }
      }
    }
  return out;
}

StartPoint start_from(const PosteriorSample& sample, const ModelSpec& spec) {
  StartPoint sp;
  sp.center0 = Coefficients::Zero(spec.outcomes - 1, spec.dim);
  sp.center1 = sp.center0;
  sp.scale = sp.center0;
  for (int i = 0; i < spec.outcomes - 1; ++i)
    for (int d = 0; d < spec.dim; ++d) {
      if (spec.at(i, d) == Inclusion::Excluded) continue;
      std::vector<double> v0 = sample.pooled({ParamRef::Kind::Beta, 0, i, d, false, ""});
      std::vector<double> v1 = sample.pooled({ParamRef::Kind::Beta, 1, i, d, false, ""});
      const double m0 = mean_of(v0), m1 = mean_of(v1);
      double s = std::max(sd_of(v0), sd_of(v1));
      if (spec.at(i, d) == Inclusion::Shared) {
        // Merged pairs restart from the average of the two state means.
        const double m = 0.5 * (m0 + m1);
        sp.center0(i, d) = m;
        sp.center1(i, d) = m;
      } else {
        sp.center0(i, d) = m0;
        sp.center1(i, d) = m1;
      }
      sp.scale(i, d) = s > 0 ? s : 0.1;
    }
  return sp;
}

RestrictionResult restrict_workflow(const Dataset& data, const ModelSpec& initial,
                                    const PriorSpec& prior, const McmcConfig& config,
                                    const RestrictOptions& opts) {
  RestrictionResult res;
  ModelSpec spec = initial.switching ? initial : initial.as_switching();
  PosteriorSample sample = run_chains(data, spec, prior, config);

  auto occupancy_collapsed = [&](const PosteriorSample& s) {
    const StateSeries ss = state_series(s);
    const double mean = std::accumulate(ss.prob.begin(), ss.prob.end(), 0.0) /
                        static_cast<double>(ss.prob.size());
    return mean < opts.min_occupancy;
  };

  for (double a : opts.levels) {
    if (occupancy_collapsed(sample)) {
      res.collapsed = true;
      res.collapse_reason = "state 1 is not realized: posterior state probabilities close to zero";
      break;
    }
    ModelSpec next = restrict_spec(spec, sample, a);
    res.passes.push_back({a, spec, next});
    if (!next.has_state_specific()) {
      res.collapsed = true;
      res.collapse_reason = "all coefficients equal across states: model reduces to ML";
      spec = next;
      break;
    }
    McmcConfig cfg = config;
    cfg.seed = config.seed + res.passes.size();
    const StartPoint start = start_from(sample, next);
    spec = next;
    sample = run_chains(data, spec, prior, cfg, start);
  }
  // Repeat the strictest pass until the refit sample no longer changes the
  // spec, so the result is a fixed point of the restriction rule.
  for (int extra = 0; !res.collapsed && !opts.levels.empty() && extra < opts.max_extra_passes; ++extra) {
    const double a = opts.levels.back();
    ModelSpec next = restrict_spec(spec, sample, a);
    if (next == spec) break;
    res.passes.push_back({a, spec, next});
    if (!next.has_state_specific()) {
      res.collapsed = true;
      res.collapse_reason = "all coefficients equal across states: model reduces to ML";
      spec = next;
      break;
    }
    McmcConfig cfg = config;
    cfg.seed = config.seed + res.passes.size();
    const StartPoint start = start_from(sample, next);
    spec = next;
    sample = run_chains(data, spec, prior, cfg, start);
  }
  if (!res.collapsed && occupancy_collapsed(sample)) {
    res.collapsed = true;
    res.collapse_reason = "state 1 is not realized: posterior state probabilities close to zero";
  }
  res.spec = spec;
  res.sample = std::move(sample);
  return res;
}

}  // namespace msml
