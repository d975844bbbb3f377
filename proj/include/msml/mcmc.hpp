#ifndef MSML_MCMC_HPP
#define MSML_MCMC_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "msml/data_model.hpp"

namespace msml {

using Rng = std::mt19937_64;

// Independent stream `stream` derived from a master seed.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

// Independent N(0, beta_sd^2) on every free coefficient; Beta(a, b) on each
// transition probability, jointly truncated to p01 <= p10.
struct PriorSpec {
  double beta_sd = 100.0;
  double trans_a = 1.0;
  double trans_b = 1.0;
  void validate() const;
};

struct McmcConfig {
  int chains = 4;
  int burnin = 1000;
  int keep = 2000;  // stored draws per chain, after thinning
  int thin = 1;
  double target_accept = 0.3;
  std::uint64_t seed = 1;
  // Swap state labels during burn-in whenever state 1 holds the majority of
  // periods; the restriction alone cannot move a chain out of that mode.
  bool relabel_burnin = true;
  void validate() const;
};

// One Metropolis block: the coefficients of one outcome row that are either
// shared across states or specific to one state.
struct BetaBlock {
  enum class Kind { Shared, State0, State1 };
  int outcome = 0;
  Kind kind = Kind::Shared;
  std::vector<int> covariates;
  std::string name() const;
};

std::vector<BetaBlock> beta_blocks(const ModelSpec& spec);

// A continuous model parameter, addressable in every draw.
struct ParamRef {
  enum class Kind { Beta, P01, P10 };
  Kind kind = Kind::Beta;
  int state = 0;  // coefficient matrix the value is read from
  int outcome = 0;
  int covariate = 0;
  bool shared = false;  // one value for both states
  std::string name;
};

std::vector<ParamRef> continuous_parameters(const ModelSpec& spec);
double param_value(const Theta& theta, const ParamRef& ref);

struct Draw {
  Theta theta;
  double loglik = 0.0;  // conditional on the drawn states
};

struct ChainResult {
  std::vector<Draw> draws;
  std::vector<double> acceptance;  // per block, post burn-in
  std::vector<double> step_scale;  // per block, frozen after burn-in
};

struct PosteriorSample {
  ModelSpec spec;
  int periods = 0;
  std::vector<BetaBlock> blocks;
  std::vector<ChainResult> chains;
  std::vector<std::string> warnings;

  std::size_t total_draws() const;
  // Draws of one parameter, pooled across chains in chain order.
  std::vector<double> pooled(const ParamRef& ref) const;
  std::vector<std::vector<double>> per_chain(const ParamRef& ref) const;
  std::vector<double> pooled_loglik() const;
};

// Starting values: each chain draws coefficients uniformly within
// center +/- 2 * scale (elementwise, per state).
struct StartPoint {
  Coefficients center0;
  Coefficients center1;
  Coefficients scale;
};

// Forward filtering of period log-emissions; returns log f(Y | beta, p)
// with the initial state drawn from the stationary distribution.
double forward_loglik(std::span<const double> emit0, std::span<const double> emit1, double p01,
                      double p10);

std::vector<std::uint8_t> sample_states_from_emissions(std::span<const double> emit0,
                                                       std::span<const double> emit1, double p01,
                                                       double p10, Rng& rng);

// Exact draw of S | Y, beta, p by forward filtering, backward sampling.
std::vector<std::uint8_t> sample_states(const Dataset& data, const ModelSpec& spec,
                                        const Coefficients& beta0, const Coefficients& beta1,
                                        double p01, double p10, Rng& rng);

struct TransitionCounts {
  int n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};
TransitionCounts count_transitions(std::span<const std::uint8_t> states);

struct TransitionProbs {
  double p01;
  double p10;
};

// Conjugate draw p01 ~ Beta(a + n01, b + n00), p10 ~ Beta(a + n10, b + n11),
// redrawn jointly until p01 <= p10 when `enforce_order` is set.
TransitionProbs sample_transition_probs(std::span<const std::uint8_t> states,
                                        const PriorSpec& prior, Rng& rng,
                                        bool enforce_order = true);

// Metropolis-within-Gibbs update of (p01, p10) | S: conjugate truncated
// proposal, corrected for the stationary probability of the first state.
TransitionProbs update_transition_probs(std::span<const std::uint8_t> states,
                                        const PriorSpec& prior, TransitionProbs current,
                                        Rng& rng);

// Random-walk Metropolis update of one block with increment chol * z.
// Returns whether the proposal was accepted; theta is updated in place.
bool sample_beta_block(const Dataset& data, const ModelSpec& spec, Theta& theta,
                       const BetaBlock& block, const Eigen::MatrixXd& chol,
                       const PriorSpec& prior, Rng& rng);

PosteriorSample run_chains(const Dataset& data, const ModelSpec& spec, const PriorSpec& prior,
                           const McmcConfig& config,
                           const std::optional<StartPoint>& start = std::nullopt);

double beta_log_prior(const ModelSpec& spec, const Theta& theta, const PriorSpec& prior);

}  // namespace msml

#endif  // MSML_MCMC_HPP
