#include "msml/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "msml/kernels.hpp"

namespace msml {

Dataset::Dataset(int periods, int outcomes, int dim, const std::vector<Record>& records)
    : periods_(periods), outcomes_(outcomes), dim_(dim) {
  if (periods < 1) throw DimensionError("dataset needs at least one period");
  if (outcomes < 2) throw DimensionError("dataset needs at least two outcomes");
  if (dim < 1) throw DimensionError("covariate dimension must be >= 1 (intercept)");

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].period < records[b].period;
  });

  offsets_.assign(static_cast<std::size_t>(periods) + 1, 0);
  period_.reserve(records.size());
  outcome_.reserve(records.size());
  x_.reserve(records.size() * static_cast<std::size_t>(dim));
  for (std::size_t k : order) {
    const Record& r = records[k];
    if (r.period < 0 || r.period >= periods) {
      std::ostringstream os;
      os << "record " << k << ": period " << r.period << " outside [0," << periods << ")";
      throw DimensionError(os.str());
    }
    if (r.outcome < 0 || r.outcome >= outcomes) {
      std::ostringstream os;
      os << "record " << k << ": outcome " << r.outcome << " outside [0," << outcomes << ")";
      throw DimensionError(os.str());
    }
    if (static_cast<int>(r.x.size()) != dim) {
      std::ostringstream os;
      os << "record " << k << ": expected D=" << dim << " covariates, got " << r.x.size();
      throw DimensionError(os.str());
    }
    if (r.x[0] != 1.0) {
      std::ostringstream os;
      os << "record " << k << ": intercept column must be 1";
      throw DimensionError(os.str());
    }
    period_.push_back(r.period);
    outcome_.push_back(r.outcome);
    x_.insert(x_.end(), r.x.begin(), r.x.end());
    ++offsets_[static_cast<std::size_t>(r.period) + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

std::vector<std::size_t> Dataset::outcome_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(outcomes_), 0);
  for (int y : outcome_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

std::vector<Record> Dataset::records() const {
  std::vector<Record> out;
  out.reserve(size());
  for (std::size_t n = 0; n < size(); ++n) {
    auto x = covariates(n);
    out.push_back({period_[n], outcome_[n], std::vector<double>(x.begin(), x.end())});
  }
  return out;
}

const char* to_string(Inclusion inc) {
  switch (inc) {
    case Inclusion::Excluded: return "excluded";
    case Inclusion::Shared: return "shared";
    case Inclusion::Specific: return "specific";
    case Inclusion::State0Only: return "state0";
    case Inclusion::State1Only: return "state1";
  }
  return "?";
}

ModelSpec ModelSpec::full(int outcomes, int dim, bool switching) {
  ModelSpec s;
  s.outcomes = outcomes;
  s.dim = dim;
  s.switching = switching;
  s.mask.assign(static_cast<std::size_t>((outcomes - 1) * dim),
                switching ? Inclusion::Specific : Inclusion::Shared);
  return s;
}

bool ModelSpec::included(int state, int i, int d) const {
  switch (at(i, d)) {
    case Inclusion::Excluded: return false;
    case Inclusion::Shared:
    case Inclusion::Specific: return true;
    case Inclusion::State0Only: return !switching || state == 0;
    case Inclusion::State1Only: return !switching || state == 1;
  }
  return false;
}

bool ModelSpec::has_state_specific() const {
  if (!switching) return false;
  return std::any_of(mask.begin(), mask.end(), [](Inclusion m) {
    return m == Inclusion::Specific || m == Inclusion::State0Only || m == Inclusion::State1Only;
  });
}

ModelSpec ModelSpec::as_nonswitching() const {
  ModelSpec s = *this;
  s.switching = false;
  for (auto& m : s.mask)
    if (m != Inclusion::Excluded) m = Inclusion::Shared;
  return s;
}

ModelSpec ModelSpec::as_switching() const {
  ModelSpec s = *this;
  s.switching = true;
  for (auto& m : s.mask)
    if (m != Inclusion::Excluded) m = Inclusion::Specific;
  return s;
}

void ModelSpec::validate() const {
  if (outcomes < 2) throw DimensionError("spec needs at least two outcomes");
  if (dim < 1) throw DimensionError("spec needs at least the intercept");
  if (mask.size() != static_cast<std::size_t>((outcomes - 1) * dim))
    throw DimensionError("inclusion mask has wrong size");
  for (int i = 0; i < outcomes - 1; ++i) {
    Inclusion m = at(i, 0);
    if (m != Inclusion::Shared && m != Inclusion::Specific)
      throw DimensionError("intercept of outcome " + std::to_string(i + 1) +
                           " must be included in both states");
    if (!switching) {
      for (int d = 0; d < dim; ++d)
        if (at(i, d) != Inclusion::Excluded && at(i, d) != Inclusion::Shared)
          throw DimensionError("non-switching spec may only use excluded/shared");
    }
  }
}

Theta Theta::zeros(const ModelSpec& spec, int periods) {
  Theta th;
  th.beta0 = Coefficients::Zero(spec.outcomes - 1, spec.dim);
  th.beta1 = th.beta0;
  th.states.assign(static_cast<std::size_t>(periods), 0);
  return th;
}

void Theta::validate(const ModelSpec& spec, int periods) const {
  for (int s = 0; s < 2; ++s) {
    const Coefficients& b = beta(s);
    if (b.rows() != spec.outcomes - 1 || b.cols() != spec.dim) {
      std::ostringstream os;
      os << "beta" << s << " has shape " << b.rows() << "x" << b.cols() << ", expected "
         << spec.outcomes - 1 << "x" << spec.dim;
      throw DimensionError(os.str());
    }
  }
  if (!spec.switching) {
    for (int i = 0; i < spec.outcomes - 1; ++i)
      for (int d = 0; d < spec.dim; ++d)
        if (!spec.included(0, i, d) && beta0(i, d) != 0.0)
          throw DimensionError("masked-out coefficient is nonzero");
    return;
  }
  if (states.size() != static_cast<std::size_t>(periods))
    throw DimensionError("state vector length " + std::to_string(states.size()) +
                         " != T=" + std::to_string(periods));
  if (!(p01 > 0 && p01 < 1 && p10 > 0 && p10 < 1))
    throw DegenerateError("transition probabilities must lie in (0,1)");
  if (p01 > p10) throw DegenerateError("label restriction p01 <= p10 violated");
  for (int i = 0; i < spec.outcomes - 1; ++i)
    for (int d = 0; d < spec.dim; ++d) {
      for (int s = 0; s < 2; ++s)
        if (!spec.included(s, i, d) && beta(s)(i, d) != 0.0)
          throw DimensionError("masked-out coefficient is nonzero");
      if (spec.at(i, d) == Inclusion::Shared && beta0(i, d) != beta1(i, d))
        throw DimensionError("shared coefficient differs across states");
    }
}

std::vector<double> outcome_probs(const Coefficients& beta, std::span<const double> x) {
  if (static_cast<std::size_t>(beta.cols()) != x.size()) {
    std::ostringstream os;
    os << "covariate dimension mismatch: expected D=" << beta.cols() << ", got " << x.size();
    throw DimensionError(os.str());
  }
  const auto rows = static_cast<std::size_t>(beta.rows());
  std::vector<double> u(rows + 1, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) acc += beta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) * x[d];
    u[i] = acc;
  }
  const double m = *std::max_element(u.begin(), u.end());
  double z = 0.0;
  for (double& v : u) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : u) v /= z;
  return u;
}

double log_outcome_prob(const Coefficients& beta, std::span<const double> x, int outcome) {
  return kernels::log_prob(beta, x.data(), outcome);
}

StationaryProbs stationary_probs(double p01, double p10) {
  const double sum = p01 + p10;
  if (!(sum > 0.0)) throw DegenerateError("degenerate chain: p01 + p10 = 0");
  return {p10 / sum, p01 / sum};
}

double log_likelihood(const Dataset& data, const ModelSpec& spec, const Theta& theta) {
  theta.validate(spec, data.periods());
  if (data.dim() != spec.dim || data.outcomes() != spec.outcomes)
    throw DimensionError("dataset and spec dimensions disagree");
  std::vector<double> per0(static_cast<std::size_t>(data.periods()));
  kernels::period_loglik(data, theta.beta0, per0);
  if (!spec.switching) return kernels::ordered_sum(per0);
  std::vector<double> per1(per0.size());
  kernels::period_loglik(data, theta.beta1, per1);
  for (std::size_t t = 0; t < per0.size(); ++t)
    if (theta.states[t] == 1) per0[t] = per1[t];
  return kernels::ordered_sum(per0);
}

}  // namespace msml
