#include "msml/mle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace msml {

namespace {

struct Objective {
  double loglik = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;  // of the log-likelihood (negative semidefinite)
};

Coefficients unpack(const ModelSpec& spec, const std::vector<std::pair<int, int>>& index,
                    const Eigen::VectorXd& v) {
  Coefficients b = Coefficients::Zero(spec.outcomes - 1, spec.dim);
  for (std::size_t k = 0; k < index.size(); ++k) b(index[k].first, index[k].second) = v(static_cast<Eigen::Index>(k));
  return b;
}

// Log-likelihood with score and Hessian. Free parameters are the included
// (outcome, covariate) pairs; `slot(i,d)` maps to their position or -1.
Objective evaluate(const Dataset& data, const ModelSpec& spec,
                   const std::vector<std::pair<int, int>>& index, const Coefficients& beta,
                   bool with_hessian) {
  const int rows = spec.outcomes - 1;
  const int dim = spec.dim;
  const auto K = static_cast<Eigen::Index>(index.size());
  std::vector<int> slot(static_cast<std::size_t>(rows * dim), -1);
  for (std::size_t k = 0; k < index.size(); ++k)
    slot[static_cast<std::size_t>(index[k].first * dim + index[k].second)] = static_cast<int>(k);

  Objective obj;
  obj.grad = Eigen::VectorXd::Zero(K);
  if (with_hessian) obj.hess = Eigen::MatrixXd::Zero(K, K);

  std::vector<double> prob;
  for (std::size_t n = 0; n < data.size(); ++n) {
    auto x = data.covariates(n);
    const int y = data.outcome(n);
    prob = outcome_probs(beta, x);
    obj.loglik += std::log(prob[static_cast<std::size_t>(y)]);
    for (int i = 0; i < rows; ++i) {
      const double resid = (y == i ? 1.0 : 0.0) - prob[static_cast<std::size_t>(i)];
      for (int d = 0; d < dim; ++d) {
        const int a = slot[static_cast<std::size_t>(i * dim + d)];
        if (a < 0) continue;
        obj.grad(a) += resid * x[static_cast<std::size_t>(d)];
        if (!with_hessian) continue;
        for (int j = 0; j < rows; ++j) {
          const double w = prob[static_cast<std::size_t>(i)] *
                           ((i == j ? 1.0 : 0.0) - prob[static_cast<std::size_t>(j)]);
          for (int e = 0; e < dim; ++e) {
            const int b = slot[static_cast<std::size_t>(j * dim + e)];
            if (b < a) continue;
            obj.hess(a, b) -= w * x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(e)];
          }
        }
      }
    }
  }
  if (with_hessian) {
    const Eigen::MatrixXd upper = obj.hess;
    obj.hess.triangularView<Eigen::StrictlyLower>() = upper.transpose();
  }
  return obj;
}

void check_columns(const Dataset& data, const ModelSpec& spec) {
  for (int d = 1; d < spec.dim; ++d) {
    bool used = false;
    for (int i = 0; i < spec.outcomes - 1; ++i) used = used || spec.at(i, d) != Inclusion::Excluded;
    if (!used) continue;
    const double first = data.covariates(0)[static_cast<std::size_t>(d)];
    bool varies = false;
    for (std::size_t n = 1; n < data.size() && !varies; ++n)
      varies = data.covariates(n)[static_cast<std::size_t>(d)] != first;
    if (!varies)
      throw DegenerateError("covariate column " + std::to_string(d) +
                            " is constant and collinear with the intercept");
  }
}

}  // namespace

std::vector<std::pair<int, int>> free_index(const ModelSpec& spec) {
  std::vector<std::pair<int, int>> index;
  for (int i = 0; i < spec.outcomes - 1; ++i)
    for (int d = 0; d < spec.dim; ++d)
      if (spec.at(i, d) != Inclusion::Excluded) index.emplace_back(i, d);
  return index;
}

Eigen::VectorXd ml_gradient(const Dataset& data, const ModelSpec& spec, const Coefficients& beta) {
  return evaluate(data, spec, free_index(spec), beta, false).grad;
}

MleFit fit_ml(const Dataset& data, const ModelSpec& spec_in, const MleOptions& opts) {
  const ModelSpec spec = spec_in.switching ? spec_in.as_nonswitching() : spec_in;
  spec.validate();
  if (data.dim() != spec.dim || data.outcomes() != spec.outcomes)
    throw DimensionError("dataset and spec dimensions disagree");
  if (data.empty()) throw DegenerateError("cannot fit an empty dataset");
  check_columns(data, spec);

  const auto index = free_index(spec);
  const auto K = static_cast<Eigen::Index>(index.size());
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(K);
  Objective obj = evaluate(data, spec, index, unpack(spec, index, theta), true);

  int iter = 0;
  double gnorm = obj.grad.cwiseAbs().maxCoeff();
  for (; iter < opts.max_iter && gnorm >= opts.grad_tol; ++iter) {
    Eigen::LLT<Eigen::MatrixXd> llt(-obj.hess);
    Eigen::VectorXd step;
    if (llt.info() == Eigen::Success) {
      step = llt.solve(obj.grad);
    } else {
      step = obj.grad / std::max(1.0, obj.grad.norm());
    }
    double scale = 1.0;
    bool improved = false;
    Objective trial;
    Eigen::VectorXd cand;
    // Near the optimum the change in LL drops below summation noise; allow
    // a decrease of that size so Newton can finish on the gradient.
    const double noise = 1e-11 * std::max(1.0, std::abs(obj.loglik));
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      cand = theta + scale * step;
      trial = evaluate(data, spec, index, unpack(spec, index, cand), true);
      if (std::isfinite(trial.loglik) && trial.loglik >= obj.loglik - noise) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    theta = cand;
    obj = std::move(trial);
    gnorm = obj.grad.cwiseAbs().maxCoeff();
    if (theta.cwiseAbs().maxCoeff() > opts.coef_bound) {
      std::ostringstream os;
      os << "coefficient exceeded bound " << opts.coef_bound
         << " (separable or degenerate data)";
      throw DegenerateError(os.str());
    }
  }
  if (gnorm >= opts.grad_tol) {
    std::ostringstream os;
    os << "Newton iteration did not converge after " << iter << " iterations, |grad|="
       << gnorm;
    throw MleConvergenceError(os.str(), unpack(spec, index, theta), gnorm);
  }

  Eigen::LDLT<Eigen::MatrixXd> info(-obj.hess);
  if (info.info() != Eigen::Success || info.rcond() < 1e-14)
    throw DegenerateError("observed information is singular");

  MleFit fit;
  fit.spec = spec;
  fit.index = index;
  fit.beta_hat = unpack(spec, index, theta);
  fit.cov = info.solve(Eigen::MatrixXd::Identity(K, K));
  fit.se = Coefficients::Zero(spec.outcomes - 1, spec.dim);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double v = fit.cov(k, k);
    if (!(v > 0)) throw DegenerateError("non-positive variance in inverse information");
    fit.se(index[static_cast<std::size_t>(k)].first, index[static_cast<std::size_t>(k)].second) = std::sqrt(v);
  }
  fit.loglik = obj.loglik;
  fit.K = static_cast<int>(K);
  fit.aic = 2.0 * fit.K - 2.0 * fit.loglik;
  fit.iterations = iter;
  fit.grad_norm = gnorm;
  return fit;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

WaldTest wald_t(double estimate, double se) {
  if (!(se > 0)) throw DegenerateError("standard error is zero: degenerate information");
  const double t = estimate / se;
  return {t, 2.0 * normal_cdf(-std::abs(t))};
}

WaldTest wald_t(const MleFit& fit, int outcome, int covariate) {
  if (fit.spec.at(outcome, covariate) == Inclusion::Excluded)
    throw DimensionError("coefficient (" + std::to_string(outcome) + "," +
                         std::to_string(covariate) + ") is not in the model");
  return wald_t(fit.beta_hat(outcome, covariate), fit.se(outcome, covariate));
}

std::pair<double, double> confidence_interval95(const MleFit& fit, int outcome, int covariate) {
  const double b = fit.beta_hat(outcome, covariate);
  const double h = 1.96 * fit.se(outcome, covariate);
  return {b - h, b + h};
}

ModelSpec select_covariates(const Dataset& data, const ModelSpec& candidate,
                            const MleOptions& opts, double alpha) {
  ModelSpec spec = candidate.switching ? candidate.as_nonswitching() : candidate;
  MleFit fit = fit_ml(data, spec, opts);
  for (;;) {
    struct Cand {
      double p;
      int i;
      int d;
    };
    std::vector<Cand> cands;
    for (auto [i, d] : fit.index) {
      if (d == 0) continue;
      const double p = wald_t(fit, i, d).p;
      if (p > alpha) cands.push_back({p, i, d});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.p != b.p) return a.p > b.p;
      return std::pair(a.i, a.d) < std::pair(b.i, b.d);
    });
    bool dropped = false;
    for (const Cand& c : cands) {
      ModelSpec trial = spec;
      trial.set(c.i, c.d, Inclusion::Excluded);
      MleFit refit;
      try {
        refit = fit_ml(data, trial, opts);
      } catch (const Error&) {
        continue;
      }
      if (refit.aic <= fit.aic) {
        spec = trial;
        fit = std::move(refit);
        dropped = true;
        break;
      }
    }
    if (!dropped) return spec;
  }
}

}  // namespace msml
