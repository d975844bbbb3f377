#ifndef MSML_KERNELS_HPP
#define MSML_KERNELS_HPP

// Hot loops over records. Each kernel has a serial reference version and an
// OpenMP version over periods; results are written per period and reduced in
// period order, so both variants return bit-identical values.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "msml/data_model.hpp"

namespace msml::kernels {

// log softmax of the observed outcome; utilities are max-shifted.
inline double log_prob(const Coefficients& beta, const double* x, int outcome) {
  const Eigen::Index rows = beta.rows();
  const Eigen::Index dim = beta.cols();
  double u[16];
  double umax = 0.0;  // base outcome utility
  double* util = u;
  std::vector<double> heap;
  if (rows + 1 > 16) {
    heap.resize(static_cast<std::size_t>(rows + 1));
    util = heap.data();
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (Eigen::Index d = 0; d < dim; ++d) acc += beta(i, d) * x[d];
    util[i] = acc;
    if (acc > umax) umax = acc;
  }
  util[rows] = 0.0;
  double z = 0.0;
  for (Eigen::Index i = 0; i <= rows; ++i) z += std::exp(util[i] - umax);
  const double lp = util[outcome] - umax - std::log(z);
  if (std::isnan(lp)) return -std::numeric_limits<double>::infinity();
  return lp;
}

// out[t] = sum over records of period t of log P(observed outcome | beta).
void period_loglik_serial(const Dataset& data, const Coefficients& beta, std::span<double> out);
void period_loglik_parallel(const Dataset& data, const Coefficients& beta, std::span<double> out);

// Dispatches to the parallel version unless already inside a parallel region.
void period_loglik(const Dataset& data, const Coefficients& beta, std::span<double> out);

// Sum of log-probabilities over periods whose state equals `state`.
double state_loglik_serial(const Dataset& data, const Coefficients& beta,
                           std::span<const std::uint8_t> states, std::uint8_t state);
double state_loglik_parallel(const Dataset& data, const Coefficients& beta,
                             std::span<const std::uint8_t> states, std::uint8_t state);
double state_loglik(const Dataset& data, const Coefficients& beta,
                    std::span<const std::uint8_t> states, std::uint8_t state);

// Left-to-right sum; the fixed order keeps reductions reproducible.
double ordered_sum(std::span<const double> v);

}  // namespace msml::kernels

#endif  // MSML_KERNELS_HPP
