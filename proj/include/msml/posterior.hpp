#ifndef MSML_POSTERIOR_HPP
#define MSML_POSTERIOR_HPP

#include <array>
#include <string>
#include <vector>

#include "msml/mcmc.hpp"

namespace msml {

// Equal-tail interval: posterior mass a/2 below `lower` and a/2 above `upper`.
struct CredibleInterval {
  std::string name;
  double level = 0.95;
  double lower = 0.0;
  double upper = 0.0;
  double mean = 0.0;
};

// Type-7 quantile (linear interpolation of order statistics) of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p);

CredibleInterval credible_interval(std::vector<double> draws, double level,
                                   std::string name = {});

// One interval per continuous parameter (see continuous_parameters), pooled
// across chains. Requires at least 100 pooled draws.
std::vector<CredibleInterval> summarize(const PosteriorSample& sample, double level);

// Interval of beta0 - beta1 computed draw by draw.
CredibleInterval difference_interval(const PosteriorSample& sample, int outcome, int covariate,
                                     double level);

// Intervals of the stationary probabilities (p0bar, p1bar) of a switching fit.
std::array<CredibleInterval, 2> stationary_intervals(const PosteriorSample& sample, double level);

struct StateSeries {
  std::vector<double> prob;  // P(s_t = 1 | Y)
  std::vector<double> sd;    // posterior std of s_t
};

StateSeries state_series(const PosteriorSample& sample);

// Posterior means of the continuous parameters; states set to the rounded
// posterior probabilities.
Theta posterior_mean(const PosteriorSample& sample);

// Outcome probabilities at the posterior-mean coefficients, averaged over
// all records, for state 0 and state 1.
std::array<std::vector<double>, 2> averaged_outcome_probs(const PosteriorSample& sample,
                                                          const Dataset& data);

// One restriction pass at significance level a.
ModelSpec restrict_spec(const ModelSpec& spec, const PosteriorSample& sample, double a);

struct RestrictOptions {
  std::vector<double> levels{0.40, 0.15, 0.05};
  // Collapse is reported when the mean of P(s_t=1|Y) falls below this.
  double min_occupancy = 0.02;
  // Refits allowed after the last level while it still changes the spec.
  int max_extra_passes = 3;
};

struct RestrictionPass {
  double a = 0.0;
  ModelSpec before;
  ModelSpec after;
};

struct RestrictionResult {
  ModelSpec spec;
  PosteriorSample sample;
  bool collapsed = false;
  std::string collapse_reason;
  std::vector<RestrictionPass> passes;
};

RestrictionResult restrict_workflow(const Dataset& data, const ModelSpec& initial,
                                    const PriorSpec& prior, const McmcConfig& config,
                                    const RestrictOptions& opts = {});

// Start point centred on the posterior means of `sample`, projected onto
// `spec`'s mask, with the posterior standard deviations as jitter scale.
StartPoint start_from(const PosteriorSample& sample, const ModelSpec& spec);

}  // namespace msml

#endif  // MSML_POSTERIOR_HPP
