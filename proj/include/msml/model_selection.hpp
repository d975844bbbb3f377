#ifndef MSML_MODEL_SELECTION_HPP
#define MSML_MODEL_SELECTION_HPP

#include <cstdint>
#include <span>

#include "msml/mcmc.hpp"

namespace msml {

struct MarginalLik {
  double log_ml = 0.0;
  double lower = 0.0;  // bootstrap percentile 95% interval
  double upper = 0.0;
  std::size_t n_draws = 0;
};

// Harmonic-mean estimate log f(Y|M) = -(logsumexp(-LL_j) - log J), with a
// percentile bootstrap interval from `n_boot` resamples of the draws.
MarginalLik harmonic_mean_log_ml(std::span<const double> loglik, std::uint64_t seed = 1,
                                 int n_boot = 1000);
MarginalLik harmonic_mean_log_ml(const PosteriorSample& sample, std::uint64_t seed = 1,
                                 int n_boot = 1000);

// log of f(Y|M_b) / f(Y|M_a); positive favours b.
double bayes_factor(const MarginalLik& a, const MarginalLik& b);

double log_sum_exp(std::span<const double> v);

}  // namespace msml

#endif  // MSML_MODEL_SELECTION_HPP
