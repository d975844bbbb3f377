#include "msml/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msml {

double weighted_corr(const std::vector<double>& a, const std::vector<double>& b,
                     const std::vector<double>& w) {
  if (a.size() != b.size() || a.size() != w.size())
    throw DimensionError("weighted_corr: series and weights must have equal length");
  double sw = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DimensionError("weighted_corr: bad weight");
    sw += x;
  }
  if (!(sw > 0.0)) throw DegenerateError("weighted_corr: all weights are zero");
  double ma = 0.0, mb = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    ma += w[t] * a[t];
    mb += w[t] * b[t];
  }
  ma /= sw;
  mb /= sw;
  double cab = 0.0, caa = 0.0, cbb = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double da = a[t] - ma, db = b[t] - mb;
    cab += w[t] * da * db;
    caa += w[t] * da * da;
    cbb += w[t] * db * db;
  }
  if (!(caa > 0.0) || !(cbb > 0.0))
    throw DegenerateError("weighted_corr: zero weighted variance, correlation undefined");
  return std::clamp(cab / std::sqrt(caa * cbb), -1.0, 1.0);
}

std::vector<double> state_weights(const StateSeries& s) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> inv(s.sd.size());
  for (std::size_t t = 0; t < inv.size(); ++t) inv[t] = s.sd[t] > 0.0 ? 1.0 / s.sd[t] : inf;
  std::vector<double> sorted = inv;
  std::sort(sorted.begin(), sorted.end());
  auto median_of = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  double med = sorted.empty() ? 1.0 : median_of(sorted);
  if (!std::isfinite(med)) {
    // More than half the periods are certain; cap at the median of the
    // finite weights instead, or use uniform weights if there are none.
    std::vector<double> finite;
    for (double x : sorted)
      if (std::isfinite(x)) finite.push_back(x);
    med = finite.empty() ? 1.0 : median_of(finite);
  }
  std::vector<double> w(inv.size());
  for (std::size_t t = 0; t < w.size(); ++t) w[t] = std::min(inv[t], med);
  return w;
}

double weighted_corr(const StateSeries& a, const std::vector<double>& b) {
  return weighted_corr(a.prob, b, state_weights(a));
}

CorrMatrix corr_matrix(const std::vector<NamedStates>& states,
                       const std::vector<NamedSeries>& externals,
                       const std::optional<std::vector<std::size_t>>& periods) {
  if (states.empty()) throw DimensionError("corr_matrix: need at least one state series");
  const std::size_t T = states[0].series.prob.size();
  for (const auto& s : states)
    if (s.series.prob.size() != T) throw DimensionError("corr_matrix: state series lengths differ");
  for (const auto& e : externals)
    if (e.values.size() != T)
      throw DimensionError("corr_matrix: external series '" + e.name + "' has wrong length");

  std::vector<std::size_t> idx;
  if (periods) {
    idx = *periods;
    for (std::size_t t : idx)
      if (t >= T) throw DimensionError("corr_matrix: period mask index out of range");
  } else {
    idx.resize(T);
    for (std::size_t t = 0; t < T; ++t) idx[t] = t;
  }
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t t : idx) out.push_back(v[t]);
    return out;
  };

  std::vector<std::vector<double>> weights;
  for (const auto& s : states) weights.push_back(pick(state_weights(s.series)));

  CorrMatrix m;
  for (const auto& s : states) {
    m.row_names.push_back(s.name);
    m.col_names.push_back(s.name);
  }
  for (const auto& e : externals) m.row_names.push_back(e.name);

  for (std::size_t r = 0; r < states.size(); ++r) {
    std::vector<double> row;
    for (std::size_t c = 0; c < states.size(); ++c) {
      if (r == c) {
        row.push_back(1.0);
        continue;
      }
      std::vector<double> w(idx.size());
      for (std::size_t k = 0; k < w.size(); ++k) w[k] = weights[r][k] * weights[c][k];
      row.push_back(weighted_corr(pick(states[r].series.prob), pick(states[c].series.prob), w));
    }
    m.values.push_back(std::move(row));
  }
  for (const auto& e : externals) {
    std::vector<double> row;
    for (std::size_t c = 0; c < states.size(); ++c)
      row.push_back(weighted_corr(pick(states[c].series.prob), pick(e.values), weights[c]));
    m.values.push_back(std::move(row));
  }
  return m;
}

std::vector<double> weekly_average(const std::vector<double>& daily, std::size_t days) {
  if (days == 0) throw DimensionError("weekly_average: group size must be positive");
  std::vector<double> out;
  for (std::size_t i = 0; i < daily.size(); i += days) {
    const std::size_t end = std::min(daily.size(), i + days);
    double acc = 0.0;
    for (std::size_t k = i; k < end; ++k) acc += daily[k];
    out.push_back(acc / static_cast<double>(end - i));
  }
  return out;
}

double harmonic_mean_visibility(const std::vector<double>& distances, double floor) {
  if (distances.empty()) throw DimensionError("harmonic mean of empty series");
  double acc = 0.0;
  for (double d : distances) acc += 1.0 / std::max(d, floor);
  return static_cast<double>(distances.size()) / acc;
}

}  // namespace msml
