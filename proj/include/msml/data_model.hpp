#ifndef MSML_DATA_MODEL_HPP
#define MSML_DATA_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace msml {

// Error hierarchy. Every module throws one of these; the CLI maps them to
// exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class SampleSizeError : public Error {
 public:
  using Error::Error;
};

// (I-1) x D coefficient matrix; the base (last) outcome is implicit and zero.
using Coefficients = Eigen::MatrixXd;

// One accident: 0-based period and outcome, covariates with x[0] == 1.
struct Record {
  int period = 0;
  int outcome = 0;
  std::vector<double> x;
};

// Panel of event records grouped by time period. Records are stored sorted
// by period (stable), with covariates in one contiguous row-major block.
class Dataset {
 public:
  Dataset() = default;
  Dataset(int periods, int outcomes, int dim, const std::vector<Record>& records);

  int periods() const { return periods_; }
  int outcomes() const { return outcomes_; }
  int dim() const { return dim_; }
  std::size_t size() const { return outcome_.size(); }
  bool empty() const { return outcome_.empty(); }

  std::size_t period_begin(int t) const { return offsets_[static_cast<std::size_t>(t)]; }
  std::size_t period_end(int t) const { return offsets_[static_cast<std::size_t>(t) + 1]; }
  std::size_t count_in_period(int t) const { return period_end(t) - period_begin(t); }

  std::span<const double> covariates(std::size_t n) const {
    return {x_.data() + n * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  int outcome(std::size_t n) const { return outcome_[n]; }
  int period(std::size_t n) const { return period_[n]; }

  std::vector<std::size_t> outcome_counts() const;
  std::vector<Record> records() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  int periods_ = 0;
  int outcomes_ = 0;
  int dim_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> period_;
  std::vector<int> outcome_;
  std::vector<double> x_;
};

// Per-coefficient inclusion. For non-switching specs only Excluded vs
// anything-else matters. State0Only/State1Only arise when the restriction
// workflow zeroes one state's value of a state-specific coefficient.
enum class Inclusion : std::uint8_t { Excluded, Shared, Specific, State0Only, State1Only };

const char* to_string(Inclusion inc);

struct ModelSpec {
  int outcomes = 0;
  int dim = 0;
  bool switching = false;
  std::vector<Inclusion> mask;  // (outcomes-1) x dim, row-major

  // Every coefficient included; Specific when switching, Shared otherwise.
  static ModelSpec full(int outcomes, int dim, bool switching);

  Inclusion at(int i, int d) const { return mask[static_cast<std::size_t>(i * dim + d)]; }
  void set(int i, int d, Inclusion v) { mask[static_cast<std::size_t>(i * dim + d)] = v; }

  bool included(int state, int i, int d) const;
  bool has_state_specific() const;
  // Same spec with switching off; state-specific entries become Shared.
  ModelSpec as_nonswitching() const;
  // Switching spec where every included coefficient is state-specific.
  ModelSpec as_switching() const;
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct Theta {
  Coefficients beta0;
  Coefficients beta1;
  double p01 = 0.5;
  double p10 = 0.5;
  std::vector<std::uint8_t> states;

  // All-zero coefficients, p01 = p10 = 0.5, all periods in state 0.
  static Theta zeros(const ModelSpec& spec, int periods);

  const Coefficients& beta(int state) const { return state == 0 ? beta0 : beta1; }
  Coefficients& beta(int state) { return state == 0 ? beta0 : beta1; }

  // Checks shapes, masked zeros, shared equality and p01 <= p10.
  void validate(const ModelSpec& spec, int periods) const;
};

// Softmax over utilities (beta_i'x for i < I, 0 for the base outcome).
std::vector<double> outcome_probs(const Coefficients& beta, std::span<const double> x);

// log P(outcome | x) under beta; -inf if the probability underflows to 0.
double log_outcome_prob(const Coefficients& beta, std::span<const double> x, int outcome);

struct StationaryProbs {
  double p0;
  double p1;
};

StationaryProbs stationary_probs(double p01, double p10);

// Log-likelihood of the data given all parameters including the states.
// Non-switching specs use beta0 everywhere and ignore states/transitions.
double log_likelihood(const Dataset& data, const ModelSpec& spec, const Theta& theta);

}  // namespace msml

#endif  // MSML_DATA_MODEL_HPP
