#include "msml/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "msml/posterior.hpp"

namespace msml {

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

namespace {

double harmonic(std::span<const double> loglik) {
  std::vector<double> neg(loglik.size());
  std::transform(loglik.begin(), loglik.end(), neg.begin(), [](double x) { return -x; });
  return -(log_sum_exp(neg) - std::log(static_cast<double>(loglik.size())));
}

}  // namespace

MarginalLik harmonic_mean_log_ml(std::span<const double> loglik, std::uint64_t seed, int n_boot) {
  if (loglik.size() < 100)
    throw SampleSizeError("harmonic mean needs at least 100 draws, have " +
                          std::to_string(loglik.size()));
  for (double x : loglik)
    if (!std::isfinite(x)) throw DegenerateError("non-finite log-likelihood in draws");
  MarginalLik ml;
  ml.n_draws = loglik.size();
  ml.log_ml = harmonic(loglik);

  Rng rng = make_rng(seed, 0x626f6f74);
  std::uniform_int_distribution<std::size_t> pick(0, loglik.size() - 1);
  std::vector<double> boot(static_cast<std::size_t>(n_boot));
  std::vector<double> resample(loglik.size());
  for (auto& b : boot) {
    for (auto& r : resample) r = loglik[pick(rng)];
    b = harmonic(resample);
  }
  std::sort(boot.begin(), boot.end());
  // The percentile interval of a skewed bootstrap distribution need not
  // contain the point estimate; widen it to do so.
  ml.lower = std::min(quantile_sorted(boot, 0.025), ml.log_ml);
  ml.upper = std::max(quantile_sorted(boot, 0.975), ml.log_ml);
  return ml;
}

MarginalLik harmonic_mean_log_ml(const PosteriorSample& sample, std::uint64_t seed, int n_boot) {
  const std::vector<double> ll = sample.pooled_loglik();
  return harmonic_mean_log_ml(ll, seed, n_boot);
}

double bayes_factor(const MarginalLik& a, const MarginalLik& b) { return b.log_ml - a.log_ml; }

}  // namespace msml
