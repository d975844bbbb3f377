#ifndef MSML_CORRELATION_HPP
#define MSML_CORRELATION_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msml/posterior.hpp"

namespace msml {

// Weighted Pearson correlation with weighted means and covariances.
double weighted_corr(const std::vector<double>& a, const std::vector<double>& b,
                     const std::vector<double>& w);

// w_t = min(1/std_t, median_t(1/std_t)); std_t = 0 gets the median weight.
std::vector<double> state_weights(const StateSeries& s);

// Correlation of P(s_t=1|Y) with a plain series, weighted by state_weights.
double weighted_corr(const StateSeries& a, const std::vector<double>& b);

struct NamedStates {
  std::string name;
  StateSeries series;
};

struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

// Rows: state series then external series; columns: state series.
struct CorrMatrix {
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;
  std::vector<std::vector<double>> values;  // [row][col]
};

// State-vs-state cells use the product of both series' weights; state-vs-
// external cells use the state's weights. `periods` restricts the
// computation to a subset of t (seasonal panels).
CorrMatrix corr_matrix(const std::vector<NamedStates>& states,
                       const std::vector<NamedSeries>& externals,
                       const std::optional<std::vector<std::size_t>>& periods = std::nullopt);

// Averages consecutive groups of `days` values (the last group may be short).
std::vector<double> weekly_average(const std::vector<double>& daily, std::size_t days = 7);

// Harmonic mean with every distance floored at `floor`.
double harmonic_mean_visibility(const std::vector<double>& distances, double floor = 0.25);

}  // namespace msml

#endif  // MSML_CORRELATION_HPP
