#include "msml/diagnostics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "msml/kernels.hpp"
#include "msml/posterior.hpp"

namespace msml {

namespace {

void check_shape(std::size_t m, std::size_t n) {
  if (m < 2) throw SampleSizeError("PSRF needs at least two chains");
  if (n < 2) throw SampleSizeError("PSRF needs chains of length >= 2");
}

}  // namespace

double psrf(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  check_shape(m, m ? chains[0].size() : 0);
  const std::size_t n = chains[0].size();
  for (const auto& c : chains)
    if (c.size() != n) throw DimensionError("PSRF chains must have equal length");

  std::vector<double> means(m);
  double W = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double mu = 0.0;
    for (double x : chains[j]) mu += x;
    mu /= static_cast<double>(n);
    means[j] = mu;
    double ss = 0.0;
    for (double x : chains[j]) ss += (x - mu) * (x - mu);
    W += ss / static_cast<double>(n - 1);
  }
  W /= static_cast<double>(m);
  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= static_cast<double>(m);
  double B_n = 0.0;  // B / n
  for (double mu : means) B_n += (mu - grand) * (mu - grand);
  B_n /= static_cast<double>(m - 1);

  if (W == 0.0) return B_n > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  const double nn = static_cast<double>(n);
  const double V = (nn - 1.0) / nn * W + B_n;
  return std::sqrt(V / W);
}

double mpsrf(const std::vector<Eigen::MatrixXd>& chains) {
  const std::size_t m = chains.size();
  check_shape(m, m ? static_cast<std::size_t>(chains[0].rows()) : 0);
  const Eigen::Index n = chains[0].rows();
  const Eigen::Index p = chains[0].cols();
  if (p < 1) throw DimensionError("MPSRF needs at least one coordinate");
  if (n <= p) throw SampleSizeError("MPSRF needs chain length n > dimension p");
  for (const auto& c : chains)
    if (c.rows() != n || c.cols() != p) throw DimensionError("MPSRF chains must have equal shape");

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd means(static_cast<Eigen::Index>(m), p);
  for (std::size_t j = 0; j < m; ++j) {
    const Eigen::RowVectorXd mu = chains[j].colwise().mean();
    means.row(static_cast<Eigen::Index>(j)) = mu;
    const Eigen::MatrixXd c = chains[j].rowwise() - mu;
    W += c.transpose() * c / static_cast<double>(n - 1);
  }
  W /= static_cast<double>(m);
  for (Eigen::Index k = 0; k < p; ++k)
    if (!(W(k, k) > 0.0)) {
      std::ostringstream os;
      os << "MPSRF: within-chain covariance is singular (coordinate " << k
         << " has zero within-chain variance)";
      throw DegenerateError(os.str());
    }
  const Eigen::MatrixXd mc = means.rowwise() - means.colwise().mean();
  const Eigen::MatrixXd B_n = mc.transpose() * mc / static_cast<double>(m - 1);

  // Largest eigenvalue of W^{-1} B/n via the symmetric form L^{-1} B/n L^{-T}.
  Eigen::LLT<Eigen::MatrixXd> llt(W);
  if (llt.info() != Eigen::Success)
    throw DegenerateError("MPSRF: within-chain covariance is singular (collinear coordinates)");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd Linv_B = L.triangularView<Eigen::Lower>().solve(B_n);
  const Eigen::MatrixXd S =
      L.triangularView<Eigen::Lower>().solve(Linv_B.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const double lambda = std::max(0.0, es.eigenvalues().maxCoeff());
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return std::sqrt((nn - 1.0) / nn + (mm + 1.0) / mm * lambda);
}

ConvergenceSummary convergence(const PosteriorSample& sample) {
  ConvergenceSummary out;
  const auto refs = continuous_parameters(sample.spec);
  if (refs.empty() || sample.chains.size() < 2) return out;
  const auto n = static_cast<Eigen::Index>(sample.chains[0].draws.size());
  std::vector<Eigen::MatrixXd> mats(sample.chains.size(),
                                    Eigen::MatrixXd(n, static_cast<Eigen::Index>(refs.size())));
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const auto chains = sample.per_chain(refs[k]);
    const double r = psrf(chains);
    out.names.push_back(refs[k].name);
    out.psrf.push_back(r);
    out.max_psrf = std::max(out.max_psrf, r);
    for (std::size_t c = 0; c < chains.size(); ++c)
      for (Eigen::Index i = 0; i < n; ++i)
        mats[c](i, static_cast<Eigen::Index>(k)) = chains[c][static_cast<std::size_t>(i)];
  }
  out.max_psrf = *std::max_element(out.psrf.begin(), out.psrf.end());
  out.mpsrf = mpsrf(mats);
  return out;
}

PointModel PointModel::from_mle(const MleFit& fit) {
  return {false, fit.beta_hat, fit.beta_hat, 0.5, 0.5};
}

PointModel PointModel::from_posterior(const PosteriorSample& sample) {
  const Theta th = posterior_mean(sample);
  PointModel pm{sample.spec.switching, th.beta0, th.beta1, th.p01, th.p10};
  if (!pm.switching) pm.beta1 = pm.beta0;
  return pm;
}

GofResult gof_pvalue(const PointModel& model, const Dataset& data, const GofOptions& opts) {
  if (opts.replicates < 1) throw Error("gof: replicates must be positive");
  if (model.beta0.cols() != data.dim() || model.beta0.rows() != data.outcomes() - 1)
    throw DimensionError("gof: model and dataset dimensions disagree");
  const int T = data.periods();
  const int I = data.outcomes();
  const auto N = data.size();
  const auto uI = static_cast<std::size_t>(I);

  const StationaryProbs pi =
      model.switching ? stationary_probs(model.p01, model.p10) : StationaryProbs{1.0, 0.0};

  // Cumulative outcome probabilities per record and state.
  std::vector<double> cum(2 * N * uI);
  std::vector<double> expected(static_cast<std::size_t>(T) * uI, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const auto x = data.covariates(n);
    const auto p0 = outcome_probs(model.beta0, x);
    const auto p1 = model.switching ? outcome_probs(model.beta1, x) : p0;
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t i = 0; i < uI; ++i) {
      c0 += p0[i];
      c1 += p1[i];
      cum[(0 * N + n) * uI + i] = c0;
      cum[(1 * N + n) * uI + i] = c1;
      expected[static_cast<std::size_t>(data.period(n)) * uI + i] += pi.p0 * p0[i] + pi.p1 * p1[i];
    }
    cum[(0 * N + n) * uI + uI - 1] = 1.0;
    cum[(1 * N + n) * uI + uI - 1] = 1.0;
  }

  if (expected.empty() || *std::max_element(expected.begin(), expected.end()) < 1.0)
    throw SampleSizeError("gof: all expected counts below 1, data too sparse for the cell scheme");

  // Cell map: (t, i) -> cell id or -1 when the period is dropped.
  std::vector<int> cell_of(expected.size(), -1);
  std::vector<double> cell_expected;
  for (int t = 0; t < T; ++t) {
    const std::size_t base = static_cast<std::size_t>(t) * uI;
    std::size_t largest = base;
    for (std::size_t i = 1; i < uI; ++i)
      if (expected[base + i] > expected[largest]) largest = base + i;
    double pooled = 0.0;
    for (std::size_t i = 0; i < uI; ++i)
      if (base + i == largest || expected[base + i] < 1.0) pooled += expected[base + i];
    if (pooled < 1.0) continue;
    const int big = static_cast<int>(cell_expected.size());
    cell_expected.push_back(pooled);
    for (std::size_t i = 0; i < uI; ++i) {
      if (base + i == largest || expected[base + i] < 1.0) {
        cell_of[base + i] = big;
      } else {
        cell_of[base + i] = static_cast<int>(cell_expected.size());
        cell_expected.push_back(expected[base + i]);
      }
    }
  }
  if (cell_expected.empty())
    throw SampleSizeError("gof: all expected counts below 1, data too sparse for the cell scheme");

  auto chi2 = [&](const std::vector<int>& outcomes) {
    std::vector<double> obs(cell_expected.size(), 0.0);
    for (std::size_t n = 0; n < N; ++n) {
      const int c = cell_of[static_cast<std::size_t>(data.period(n)) * uI +
                            static_cast<std::size_t>(outcomes[n])];
      if (c >= 0) obs[static_cast<std::size_t>(c)] += 1.0;
    }
    double x2 = 0.0;
    for (std::size_t c = 0; c < obs.size(); ++c) {
      const double e = cell_expected[c];
      x2 += (obs[c] - e) * (obs[c] - e) / e;
    }
    return x2;
  };

  std::vector<int> observed(N);
  for (std::size_t n = 0; n < N; ++n) observed[n] = data.outcome(n);
  GofResult res;
  res.chi2_observed = chi2(observed);
  res.replicates = opts.replicates;
  res.cells = cell_expected.size();

  std::vector<double> rep_chi2(static_cast<std::size_t>(opts.replicates));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < opts.replicates; ++r) {
    Rng rng = make_rng(opts.seed, static_cast<std::uint64_t>(r) + 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::uint8_t> states(static_cast<std::size_t>(T), 0);
    if (model.switching) {
      std::uint8_t s = unif(rng) < pi.p1 ? 1 : 0;
      for (int t = 0; t < T; ++t) {
        if (t > 0) {
          const double u = unif(rng);
          s = s == 0 ? (u < model.p01 ? 1 : 0) : (u < model.p10 ? 0 : 1);
        }
        states[static_cast<std::size_t>(t)] = s;
      }
    }
    std::vector<int> outcomes(N);
    for (std::size_t n = 0; n < N; ++n) {
      const std::size_t s = states[static_cast<std::size_t>(data.period(n))];
      const double* c = &cum[(s * N + n) * uI];
      const double u = unif(rng);
      int i = 0;
      while (i < I - 1 && u >= c[i]) ++i;
      outcomes[n] = i;
    }
    rep_chi2[static_cast<std::size_t>(r)] = chi2(outcomes);
  }
  int exceed = 0;
  for (double x : rep_chi2)
    if (x >= res.chi2_observed) ++exceed;
  res.p_value = static_cast<double>(exceed) / static_cast<double>(opts.replicates);
  return res;
}

double exact_marginal_loglik(const Dataset& data, const Coefficients& beta0,
                             const Coefficients& beta1, double p01, double p10) {
  std::vector<double> e0(static_cast<std::size_t>(data.periods()));
  std::vector<double> e1(e0.size());
  kernels::period_loglik(data, beta0, e0);
  kernels::period_loglik(data, beta1, e1);
  return forward_loglik(e0, e1, p01, p10);
}

}  // namespace msml
