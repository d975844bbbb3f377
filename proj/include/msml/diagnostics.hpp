#ifndef MSML_DIAGNOSTICS_HPP
#define MSML_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "msml/mcmc.hpp"
#include "msml/mle.hpp"

namespace msml {

// Gelman-Rubin potential scale reduction factor. Chains must have equal
// length n >= 2. Returns +inf for stuck chains (W = 0 < B) and 1 when W = B = 0.
double psrf(const std::vector<std::vector<double>>& chains);

// Brooks-Gelman multivariate PSRF; each chain is an n x p matrix of draws.
double mpsrf(const std::vector<Eigen::MatrixXd>& chains);

struct ConvergenceSummary {
  std::vector<std::string> names;
  std::vector<double> psrf;
  double max_psrf = 1.0;
  double mpsrf = 1.0;
};

// PSRF per continuous parameter and MPSRF over all of them; states excluded.
ConvergenceSummary convergence(const PosteriorSample& sample);

// Fully specified model used for goodness-of-fit and synthetic data.
struct PointModel {
  bool switching = false;
  Coefficients beta0;
  Coefficients beta1;
  double p01 = 0.5;
  double p10 = 0.5;

  static PointModel from_mle(const MleFit& fit);
  static PointModel from_posterior(const PosteriorSample& sample);
};

struct GofOptions {
  int replicates = 10000;
  std::uint64_t seed = 1;
};

struct GofResult {
  double chi2_observed = 0.0;
  double p_value = 1.0;
  int replicates = 0;
  std::size_t cells = 0;
};

// Pearson chi-square over (period, outcome) cells with Monte Carlo null
// distribution. Expected counts average the two states with the stationary
// probabilities; cells with expectation below 1 are pooled into the largest
// cell of their period. Replicates redraw the states from the Markov chain
// and the outcomes at the observed covariates.
GofResult gof_pvalue(const PointModel& model, const Dataset& data, const GofOptions& opts = {});

// log f(Y | beta, p) with the state sequence summed out (forward algorithm).
double exact_marginal_loglik(const Dataset& data, const Coefficients& beta0,
                             const Coefficients& beta1, double p01, double p10);

}  // namespace msml

#endif  // MSML_DIAGNOSTICS_HPP
