#ifndef MSML_MLE_HPP
#define MSML_MLE_HPP

#include <utility>
#include <vector>

#include "msml/data_model.hpp"

namespace msml {

// Maximum-likelihood fit of the single-state multinomial logit.
struct MleFit {
  ModelSpec spec;
  Coefficients beta_hat;
  Coefficients se;  // zero where excluded
  double loglik = 0.0;
  int K = 0;
  double aic = 0.0;
  Eigen::MatrixXd cov;                     // K x K inverse observed information
  std::vector<std::pair<int, int>> index;  // (outcome, covariate) of each free parameter
  int iterations = 0;
  double grad_norm = 0.0;
};

struct MleOptions {
  int max_iter = 200;
  double grad_tol = 1e-6;
  double coef_bound = 50.0;
};

class MleConvergenceError : public ConvergenceError {
 public:
  MleConvergenceError(const std::string& what, Coefficients last, double grad_norm)
      : ConvergenceError(what), last_iterate(std::move(last)), gradient_norm(grad_norm) {}
  Coefficients last_iterate;
  double gradient_norm;
};

MleFit fit_ml(const Dataset& data, const ModelSpec& spec, const MleOptions& opts = {});

// Analytic score of the log-likelihood w.r.t. the free parameters, ordered
// as `free_index(spec)`.
Eigen::VectorXd ml_gradient(const Dataset& data, const ModelSpec& spec, const Coefficients& beta);
std::vector<std::pair<int, int>> free_index(const ModelSpec& spec);

struct WaldTest {
  double t;
  double p;  // two-sided, standard normal reference
};

WaldTest wald_t(const MleFit& fit, int outcome, int covariate);
WaldTest wald_t(double estimate, double se);

// beta_hat +/- 1.96 se.
std::pair<double, double> confidence_interval95(const MleFit& fit, int outcome, int covariate);

// Greedy backward elimination: repeatedly try to drop the least significant
// coefficient (p > alpha, largest p first, ties broken by lowest (i,d)); a
// drop is kept only if AIC does not increase. Stops when no drop is kept.
ModelSpec select_covariates(const Dataset& data, const ModelSpec& candidate,
                            const MleOptions& opts = {}, double alpha = 0.05);

double normal_cdf(double z);

}  // namespace msml

#endif  // MSML_MLE_HPP
