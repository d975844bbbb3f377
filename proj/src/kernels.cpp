#include "msml/kernels.hpp"

#include <omp.h>

#include <vector>

namespace msml::kernels {

namespace {

double one_period(const Dataset& data, const Coefficients& beta, int t) {
  double acc = 0.0;
  for (std::size_t n = data.period_begin(t); n < data.period_end(t); ++n)
    acc += log_prob(beta, data.covariates(n).data(), data.outcome(n));
  return acc;
}

}  // namespace

void period_loglik_serial(const Dataset& data, const Coefficients& beta, std::span<double> out) {
  for (int t = 0; t < data.periods(); ++t) out[static_cast<std::size_t>(t)] = one_period(data, beta, t);
}

void period_loglik_parallel(const Dataset& data, const Coefficients& beta, std::span<double> out) {
  const int periods = data.periods();
#pragma omp parallel for schedule(static)
  for (int t = 0; t < periods; ++t) out[static_cast<std::size_t>(t)] = one_period(data, beta, t);
}

void period_loglik(const Dataset& data, const Coefficients& beta, std::span<double> out) {
  if (omp_in_parallel() || omp_get_max_threads() == 1)
    period_loglik_serial(data, beta, out);
  else
    period_loglik_parallel(data, beta, out);
}

double state_loglik_serial(const Dataset& data, const Coefficients& beta,
                           std::span<const std::uint8_t> states, std::uint8_t state) {
  double acc = 0.0;
  for (int t = 0; t < data.periods(); ++t)
    if (states[static_cast<std::size_t>(t)] == state) acc += one_period(data, beta, t);
  return acc;
}

double state_loglik_parallel(const Dataset& data, const Coefficients& beta,
                             std::span<const std::uint8_t> states, std::uint8_t state) {
  const int periods = data.periods();
  std::vector<double> per(static_cast<std::size_t>(periods), 0.0);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < periods; ++t)
    if (states[static_cast<std::size_t>(t)] == state) per[static_cast<std::size_t>(t)] = one_period(data, beta, t);
  double acc = 0.0;
  for (int t = 0; t < periods; ++t)
    if (states[static_cast<std::size_t>(t)] == state) acc += per[static_cast<std::size_t>(t)];
  return acc;
}

double state_loglik(const Dataset& data, const Coefficients& beta,
                    std::span<const std::uint8_t> states, std::uint8_t state) {
  if (omp_in_parallel() || omp_get_max_threads() == 1)
    return state_loglik_serial(data, beta, states, state);
  return state_loglik_parallel(data, beta, states, state);
}

double ordered_sum(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

}  // namespace msml::kernels
