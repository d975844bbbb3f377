#include "msml/mcmc.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "msml/kernels.hpp"
#include "msml/mle.hpp"

namespace msml {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp2(double a, double b) {
  const double m = std::max(a, b);
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double draw_beta(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

double log_initial(std::uint8_t s, double p01, double p10) {
  const StationaryProbs pi = stationary_probs(p01, p10);
  return std::log(s == 0 ? pi.p0 : pi.p1);
}

Eigen::VectorXd block_values(const Theta& th, const BetaBlock& b) {
  const Coefficients& m = th.beta(b.kind == BetaBlock::Kind::State1 ? 1 : 0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(b.covariates.size()));
  for (std::size_t k = 0; k < b.covariates.size(); ++k) v(static_cast<Eigen::Index>(k)) = m(b.outcome, b.covariates[k]);
  return v;
}

void set_block(Theta& th, const BetaBlock& b, const Eigen::VectorXd& v) {
  for (std::size_t k = 0; k < b.covariates.size(); ++k) {
    const double x = v(static_cast<Eigen::Index>(k));
    switch (b.kind) {
      case BetaBlock::Kind::Shared:
        th.beta0(b.outcome, b.covariates[k]) = x;
        th.beta1(b.outcome, b.covariates[k]) = x;
        break;
      case BetaBlock::Kind::State0: th.beta0(b.outcome, b.covariates[k]) = x; break;
      case BetaBlock::Kind::State1: th.beta1(b.outcome, b.covariates[k]) = x; break;
    }
  }
}

// Log-likelihood of the records a block touches, split by state.
struct SplitLL {
  double s0 = 0.0;
  double s1 = 0.0;
  double total() const { return s0 + s1; }
};

SplitLL block_loglik(const Dataset& data, const Theta& th, std::span<const std::uint8_t> states,
                     const BetaBlock& b) {
  SplitLL r;
  if (b.kind != BetaBlock::Kind::State1) r.s0 = kernels::state_loglik(data, th.beta0, states, 0);
  if (b.kind != BetaBlock::Kind::State0) r.s1 = kernels::state_loglik(data, th.beta1, states, 1);
  return r;
}

double block_log_prior(const Eigen::VectorXd& v, const PriorSpec& prior) {
  return -0.5 * v.squaredNorm() / (prior.beta_sd * prior.beta_sd);
}

std::vector<std::uint8_t> effective_states(const ModelSpec& spec, const Theta& th, int periods) {
  if (spec.switching) return th.states;
  return std::vector<std::uint8_t>(static_cast<std::size_t>(periods), 0);
}

struct BlockAdapt {
  Eigen::MatrixXd chol;
  double log_scale = 0.0;
  long proposals = 0;
  long post_proposals = 0;
  long post_accepts = 0;
  std::vector<Eigen::VectorXd> window;
};

class Chain {
 public:
  Chain(const Dataset& data, const ModelSpec& spec, const PriorSpec& prior,
        const McmcConfig& cfg, const std::vector<BetaBlock>& blocks,
        const std::optional<StartPoint>& start, int index)
      : data_(data), spec_(spec), prior_(prior), cfg_(cfg), blocks_(blocks),
        rng_(make_rng(cfg.seed, static_cast<std::uint64_t>(index))),
        e0_(static_cast<std::size_t>(data.periods())), e1_(e0_.size()) {
    initialise(start);
  }

  ChainResult run() {
    ChainResult out;
    const int total = cfg_.burnin + cfg_.keep * cfg_.thin;
    const int cov_every = std::max(50, cfg_.burnin / 5);
    out.draws.reserve(static_cast<std::size_t>(cfg_.keep));
    for (int it = 0; it < total; ++it) {
      const bool adapting = it < cfg_.burnin;
      sweep(adapting);
      if (adapting && (it + 1) % cov_every == 0 && it + 1 < cfg_.burnin) refresh_covariances();
      if (!adapting && (it - cfg_.burnin) % cfg_.thin == 0)
        out.draws.push_back({th_, ll_.total()});
    }
    for (const BlockAdapt& a : adapt_) {
      out.acceptance.push_back(a.post_proposals > 0
                                   ? static_cast<double>(a.post_accepts) /
                                         static_cast<double>(a.post_proposals)
                                   : 0.0);
      out.step_scale.push_back(std::exp(a.log_scale));
    }
    return out;
  }

 private:
  void initialise(const std::optional<StartPoint>& start) {
    th_ = Theta::zeros(spec_, data_.periods());
    std::uniform_real_distribution<double> jitter(-2.0, 2.0);
    std::normal_distribution<double> prior_draw(0.0, prior_.beta_sd);
    for (int i = 0; i < spec_.outcomes - 1; ++i)
      for (int d = 0; d < spec_.dim; ++d) {
        if (spec_.at(i, d) == Inclusion::Excluded) continue;
        const bool shared = !spec_.switching || spec_.at(i, d) == Inclusion::Shared;
        for (int s = 0; s < (shared ? 1 : 2); ++s) {
          double v;
          if (start) {
            const double c = s == 0 ? start->center0(i, d) : start->center1(i, d);
            v = c + jitter(rng_) * start->scale(i, d);
          } else {
            v = prior_draw(rng_);
          }
          if (shared) {
            th_.beta0(i, d) = v;
            th_.beta1(i, d) = v;
          } else if (spec_.included(s, i, d)) {
            th_.beta(s)(i, d) = v;
          }
        }
      }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double a = unif(rng_);
    const double b = unif(rng_);
    th_.p01 = std::min(a, b);
    th_.p10 = std::max(a, b);

    if (spec_.switching) {
      kernels::period_loglik(data_, th_.beta0, e0_);
      kernels::period_loglik(data_, th_.beta1, e1_);
      th_.states = sample_states_from_emissions(e0_, e1_, th_.p01, th_.p10, rng_);
    }
    states_ = effective_states(spec_, th_, data_.periods());
    recompute_loglik();

    adapt_.resize(blocks_.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const BetaBlock& b = blocks_[k];
      const auto dim = static_cast<Eigen::Index>(b.covariates.size());
      Eigen::VectorXd sd(dim);
      for (Eigen::Index j = 0; j < dim; ++j) {
        double s = start ? start->scale(b.outcome, b.covariates[static_cast<std::size_t>(j)]) : 0.0;
        sd(j) = s > 0 ? s : 0.1;
      }
      adapt_[k].chol = sd.asDiagonal();
      adapt_[k].log_scale = std::log(2.38 / std::sqrt(static_cast<double>(dim)));
    }
    relabel_allowed_ = spec_.switching && cfg_.relabel_burnin &&
                       std::none_of(spec_.mask.begin(), spec_.mask.end(), [](Inclusion m) {
                         return m == Inclusion::State0Only || m == Inclusion::State1Only;
                       });
    partner_.assign(blocks_.size(), -1);
    for (std::size_t a = 0; a < blocks_.size(); ++a)
      for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (blocks_[a].outcome == blocks_[b].outcome &&
            blocks_[a].kind == BetaBlock::Kind::State0 && blocks_[b].kind == BetaBlock::Kind::State1) {
          partner_[a] = static_cast<int>(b);
          partner_[b] = static_cast<int>(a);
        }
  }

  void recompute_loglik() {
    ll_.s0 = kernels::state_loglik(data_, th_.beta0, states_, 0);
    ll_.s1 = spec_.switching ? kernels::state_loglik(data_, th_.beta1, states_, 1) : 0.0;
  }

  void sweep(bool adapting) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const BetaBlock& b = blocks_[k];
      BlockAdapt& ad = adapt_[k];
      const Eigen::VectorXd cur = block_values(th_, b);
      Eigen::VectorXd z(cur.size());
      for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = normal(rng_);
      const Eigen::VectorXd prop = cur + std::exp(ad.log_scale) * (ad.chol * z);

      SplitLL old_part;
      if (b.kind != BetaBlock::Kind::State1) old_part.s0 = ll_.s0;
      if (b.kind != BetaBlock::Kind::State0) old_part.s1 = ll_.s1;

      Theta trial = th_;
      set_block(trial, b, prop);
      const SplitLL new_part = block_loglik(data_, trial, states_, b);
      const double log_ratio = new_part.total() + block_log_prior(prop, prior_) -
                               old_part.total() - block_log_prior(cur, prior_);
      const bool accept = std::isfinite(new_part.total()) &&
                          (log_ratio >= 0.0 || std::log(unif(rng_)) < log_ratio);
      if (accept) {
        th_ = std::move(trial);
        if (b.kind != BetaBlock::Kind::State1) ll_.s0 = new_part.s0;
        if (b.kind != BetaBlock::Kind::State0) ll_.s1 = new_part.s1;
      }
      if (adapting) {
        ++ad.proposals;
        const double gain = 1.0 / std::pow(1.0 + static_cast<double>(ad.proposals) / 10.0, 0.6);
        ad.log_scale += gain * ((accept ? 1.0 : 0.0) - cfg_.target_accept);
        ad.window.push_back(block_values(th_, b));
      } else {
        ++ad.post_proposals;
        if (accept) ++ad.post_accepts;
      }
    }

    if (!spec_.switching) return;

    const TransitionProbs p = update_transition_probs(th_.states, prior_, {th_.p01, th_.p10}, rng_);
    th_.p01 = p.p01;
    th_.p10 = p.p10;

    kernels::period_loglik(data_, th_.beta0, e0_);
    kernels::period_loglik(data_, th_.beta1, e1_);
    th_.states = sample_states_from_emissions(e0_, e1_, th_.p01, th_.p10, rng_);

    if (adapting && relabel_allowed_) {
      std::size_t ones = 0;
      for (auto s : th_.states) ones += s;
      if (2 * ones > th_.states.size()) relabel();
    }
    states_ = th_.states;
    ll_ = {};
    for (std::size_t t = 0; t < states_.size(); ++t) {
      if (states_[t] == 0)
        ll_.s0 += e0_[t];
      else
        ll_.s1 += e1_[t];
    }
  }

  void relabel() {
    std::swap(th_.beta0, th_.beta1);
    for (auto& s : th_.states) s = static_cast<std::uint8_t>(1 - s);
    std::swap(e0_, e1_);
    for (std::size_t a = 0; a < blocks_.size(); ++a) {
      const int b = partner_[a];
      if (b > static_cast<int>(a)) std::swap(adapt_[a], adapt_[static_cast<std::size_t>(b)]);
    }
  }

  void refresh_covariances() {
    for (BlockAdapt& ad : adapt_) {
      const auto dim = ad.chol.rows();
      const auto n = static_cast<Eigen::Index>(ad.window.size());
      if (n >= 2 * dim + 10) {
        Eigen::MatrixXd x(n, dim);
        for (Eigen::Index r = 0; r < n; ++r) x.row(r) = ad.window[static_cast<std::size_t>(r)].transpose();
        const Eigen::RowVectorXd mean = x.colwise().mean();
        const Eigen::MatrixXd centered = x.rowwise() - mean;
        Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
        cov.diagonal().array() += 1e-10;
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success && cov.diagonal().minCoeff() > 1e-9) {
          ad.chol = llt.matrixL();
          ad.log_scale = std::log(2.38 / std::sqrt(static_cast<double>(dim)));
        }
      }
      ad.window.clear();
    }
  }

  const Dataset& data_;
  const ModelSpec& spec_;
  const PriorSpec& prior_;
  const McmcConfig& cfg_;
  const std::vector<BetaBlock>& blocks_;
  Rng rng_;
  Theta th_;
  std::vector<std::uint8_t> states_;
  SplitLL ll_;
  std::vector<double> e0_;
  std::vector<double> e1_;
  std::vector<BlockAdapt> adapt_;
  std::vector<int> partner_;
  bool relabel_allowed_ = false;
};

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6d736d6cu};
  return Rng(seq);
}

void PriorSpec::validate() const {
  if (!(beta_sd > 0)) throw Error("prior: beta_sd must be positive");
  if (!(trans_a > 0 && trans_b > 0)) throw Error("prior: Beta hyperparameters must be positive");
}

void McmcConfig::validate() const {
  if (chains < 1 || burnin < 1 || keep < 1) throw Error("mcmc config: counts must be positive");
  if (thin < 1) throw Error("mcmc config: thinning must be >= 1");
  if (!(target_accept > 0 && target_accept < 1)) throw Error("mcmc config: bad target acceptance");
}

std::string BetaBlock::name() const {
  std::ostringstream os;
  os << "outcome" << outcome + 1 << "/";
  switch (kind) {
    case Kind::Shared: os << "shared"; break;
    case Kind::State0: os << "state0"; break;
    case Kind::State1: os << "state1"; break;
  }
  return os.str();
}

std::vector<BetaBlock> beta_blocks(const ModelSpec& spec) {
  std::vector<BetaBlock> blocks;
  for (int i = 0; i < spec.outcomes - 1; ++i) {
    BetaBlock shared{i, BetaBlock::Kind::Shared, {}};
    BetaBlock s0{i, BetaBlock::Kind::State0, {}};
    BetaBlock s1{i, BetaBlock::Kind::State1, {}};
    for (int d = 0; d < spec.dim; ++d) {
      const Inclusion m = spec.at(i, d);
      if (m == Inclusion::Excluded) continue;
      if (!spec.switching || m == Inclusion::Shared) {
        shared.covariates.push_back(d);
        continue;
      }
      if (spec.included(0, i, d)) s0.covariates.push_back(d);
      if (spec.included(1, i, d)) s1.covariates.push_back(d);
    }
    for (auto* b : {&shared, &s0, &s1})
      if (!b->covariates.empty()) blocks.push_back(*b);
  }
  return blocks;
}

std::vector<ParamRef> continuous_parameters(const ModelSpec& spec) {
  std::vector<ParamRef> refs;
  for (int i = 0; i < spec.outcomes - 1; ++i)
    for (int d = 0; d < spec.dim; ++d) {
      const Inclusion m = spec.at(i, d);
      if (m == Inclusion::Excluded) continue;
      const std::string idx = "[" + std::to_string(i + 1) + "," + std::to_string(d) + "]";
      if (!spec.switching || m == Inclusion::Shared) {
        refs.push_back({ParamRef::Kind::Beta, 0, i, d, true, "beta" + idx});
        continue;
      }
      for (int s = 0; s < 2; ++s)
        if (spec.included(s, i, d))
          refs.push_back({ParamRef::Kind::Beta, s, i, d, false, "beta" + std::to_string(s) + idx});
    }
  if (spec.switching) {
    refs.push_back({ParamRef::Kind::P01, 0, 0, 0, true, "p01"});
    refs.push_back({ParamRef::Kind::P10, 0, 0, 0, true, "p10"});
  }
  return refs;
}

double param_value(const Theta& theta, const ParamRef& ref) {
  switch (ref.kind) {
    case ParamRef::Kind::Beta: return theta.beta(ref.state)(ref.outcome, ref.covariate);
    case ParamRef::Kind::P01: return theta.p01;
    case ParamRef::Kind::P10: return theta.p10;
  }
  return 0.0;
}

std::size_t PosteriorSample::total_draws() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.draws.size();
  return n;
}

std::vector<double> PosteriorSample::pooled(const ParamRef& ref) const {
  std::vector<double> out;
  out.reserve(total_draws());
  for (const auto& c : chains)
    for (const auto& d : c.draws) out.push_back(param_value(d.theta, ref));
  return out;
}

std::vector<std::vector<double>> PosteriorSample::per_chain(const ParamRef& ref) const {
  std::vector<std::vector<double>> out;
  for (const auto& c : chains) {
    auto& v = out.emplace_back();
    v.reserve(c.draws.size());
    for (const auto& d : c.draws) v.push_back(param_value(d.theta, ref));
  }
  return out;
}

std::vector<double> PosteriorSample::pooled_loglik() const {
  std::vector<double> out;
  out.reserve(total_draws());
  for (const auto& c : chains)
    for (const auto& d : c.draws) out.push_back(d.loglik);
  return out;
}

double forward_loglik(std::span<const double> emit0, std::span<const double> emit1, double p01,
                      double p10) {
  const double l00 = std::log1p(-p01), l01 = std::log(p01);
  const double l10 = std::log(p10), l11 = std::log1p(-p10);
  double a0 = log_initial(0, p01, p10) + emit0[0];
  double a1 = log_initial(1, p01, p10) + emit1[0];
  for (std::size_t t = 1; t < emit0.size(); ++t) {
    const double n0 = emit0[t] + log_sum_exp2(a0 + l00, a1 + l10);
    const double n1 = emit1[t] + log_sum_exp2(a0 + l01, a1 + l11);
    a0 = n0;
    a1 = n1;
  }
  return log_sum_exp2(a0, a1);
}

std::vector<std::uint8_t> sample_states_from_emissions(std::span<const double> emit0,
                                                       std::span<const double> emit1, double p01,
                                                       double p10, Rng& rng) {
  if (!(p01 > 0 && p01 < 1 && p10 > 0 && p10 < 1))
    throw DegenerateError("transition probabilities must lie in (0,1)");
  const std::size_t T = emit0.size();
  const double l00 = std::log1p(-p01), l01 = std::log(p01);
  const double l10 = std::log(p10), l11 = std::log1p(-p10);
  std::vector<double> a0(T), a1(T);
  a0[0] = log_initial(0, p01, p10) + emit0[0];
  a1[0] = log_initial(1, p01, p10) + emit1[0];
  for (std::size_t t = 1; t < T; ++t) {
    a0[t] = emit0[t] + log_sum_exp2(a0[t - 1] + l00, a1[t - 1] + l10);
    a1[t] = emit1[t] + log_sum_exp2(a0[t - 1] + l01, a1[t - 1] + l11);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::uint8_t> s(T);
  auto draw = [&](double w0, double w1) {
    const double prob1 = 1.0 / (1.0 + std::exp(w0 - w1));
    return static_cast<std::uint8_t>(unif(rng) < prob1 ? 1 : 0);
  };
  s[T - 1] = draw(a0[T - 1], a1[T - 1]);
  for (std::size_t t = T - 1; t-- > 0;) {
    const std::uint8_t next = s[t + 1];
    const double w0 = a0[t] + (next == 0 ? l00 : l01);
    const double w1 = a1[t] + (next == 0 ? l10 : l11);
    s[t] = draw(w0, w1);
  }
  return s;
}

std::vector<std::uint8_t> sample_states(const Dataset& data, const ModelSpec& spec,
                                        const Coefficients& beta0, const Coefficients& beta1,
                                        double p01, double p10, Rng& rng) {
  if (data.dim() != spec.dim || data.outcomes() != spec.outcomes)
    throw DimensionError("dataset and spec dimensions disagree");
  std::vector<double> e0(static_cast<std::size_t>(data.periods()));
  std::vector<double> e1(e0.size());
  kernels::period_loglik(data, beta0, e0);
  kernels::period_loglik(data, beta1, e1);
  return sample_states_from_emissions(e0, e1, p01, p10, rng);
}

TransitionCounts count_transitions(std::span<const std::uint8_t> states) {
  TransitionCounts c;
  for (std::size_t t = 1; t < states.size(); ++t) {
    const int from = states[t - 1], to = states[t];
    if (from == 0 && to == 0) ++c.n00;
    if (from == 0 && to == 1) ++c.n01;
    if (from == 1 && to == 0) ++c.n10;
    if (from == 1 && to == 1) ++c.n11;
  }
  return c;
}

TransitionProbs sample_transition_probs(std::span<const std::uint8_t> states,
                                        const PriorSpec& prior, Rng& rng, bool enforce_order) {
  const TransitionCounts c = count_transitions(states);
  for (long attempt = 0; attempt < 10'000'000; ++attempt) {
    const double p01 = draw_beta(prior.trans_a + c.n01, prior.trans_b + c.n00, rng);
    const double p10 = draw_beta(prior.trans_a + c.n10, prior.trans_b + c.n11, rng);
    if (!enforce_order || p01 <= p10) return {p01, p10};
  }
  throw ConvergenceError("transition draw: p01 <= p10 rejection sampler exhausted");
}

TransitionProbs update_transition_probs(std::span<const std::uint8_t> states,
                                        const PriorSpec& prior, TransitionProbs current,
                                        Rng& rng) {
  const TransitionCounts c = count_transitions(states);
  const double a1 = prior.trans_a + c.n01, b1 = prior.trans_b + c.n00;
  const double a2 = prior.trans_a + c.n10, b2 = prior.trans_b + c.n11;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Exact joint draw when the ordered region has reasonable mass; otherwise a
  // random-scan update of one coordinate from its truncated conditional.
  // Both are reversible for the truncated conjugate density, and the
  // fallback probability does not depend on the current value.
  TransitionProbs prop = current;
  bool exact = false;
  for (int attempt = 0; attempt < 64 && !exact; ++attempt) {
    prop.p01 = draw_beta(a1, b1, rng);
    prop.p10 = draw_beta(a2, b2, rng);
    exact = prop.p01 <= prop.p10;
  }
  if (!exact) {
    prop = current;
    if (unif(rng) < 0.5) {
      const double hi = boost::math::ibeta(a1, b1, current.p10);
      prop.p01 = hi > 0.0 ? boost::math::ibeta_inv(a1, b1, unif(rng) * hi) : current.p10;
    } else {
      const double hi = boost::math::ibetac(a2, b2, current.p01);
      prop.p10 = hi > 0.0 ? boost::math::ibetac_inv(a2, b2, unif(rng) * hi) : current.p01;
    }
    prop.p01 = std::min(prop.p01, prop.p10);
  }
  if (!(prop.p01 > 0 && prop.p10 < 1)) return current;
  const std::uint8_t first = states.front();
  const double log_ratio =
      log_initial(first, prop.p01, prop.p10) - log_initial(first, current.p01, current.p10);
  if (log_ratio >= 0.0 || std::log(unif(rng)) < log_ratio) return prop;
  return current;
}

double beta_log_prior(const ModelSpec& spec, const Theta& theta, const PriorSpec& prior) {
  double acc = 0.0;
  for (const ParamRef& r : continuous_parameters(spec)) {
    if (r.kind != ParamRef::Kind::Beta) continue;
    const double v = param_value(theta, r);
    acc -= 0.5 * v * v / (prior.beta_sd * prior.beta_sd);
  }
  return acc;
}

bool sample_beta_block(const Dataset& data, const ModelSpec& spec, Theta& theta,
                       const BetaBlock& block, const Eigen::MatrixXd& chol,
                       const PriorSpec& prior, Rng& rng) {
  const auto states = effective_states(spec, theta, data.periods());
  const Eigen::VectorXd cur = block_values(theta, block);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(cur.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = normal(rng);
  const Eigen::VectorXd prop = cur + chol * z;
  Theta trial = theta;
  set_block(trial, block, prop);
  const double old_ll = block_loglik(data, theta, states, block).total();
  const double new_ll = block_loglik(data, trial, states, block).total();
  if (!std::isfinite(new_ll)) return false;
  const double log_ratio =
      new_ll + block_log_prior(prop, prior) - old_ll - block_log_prior(cur, prior);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (log_ratio >= 0.0 || std::log(unif(rng)) < log_ratio) {
    theta = std::move(trial);
    return true;
  }
  return false;
}

PosteriorSample run_chains(const Dataset& data, const ModelSpec& spec, const PriorSpec& prior,
                           const McmcConfig& config, const std::optional<StartPoint>& start) {
  spec.validate();
  prior.validate();
  config.validate();
  if (data.dim() != spec.dim || data.outcomes() != spec.outcomes)
    throw DimensionError("dataset and spec dimensions disagree");

  std::optional<StartPoint> init = start;
  if (!init && !data.empty()) {
    try {
      const MleFit fit = fit_ml(data, spec.as_nonswitching());
      init = StartPoint{fit.beta_hat, fit.beta_hat, fit.se};
    } catch (const Error&) {
      // fall back to prior draws
    }
  }

  PosteriorSample sample;
  sample.spec = spec;
  sample.periods = data.periods();
  sample.blocks = beta_blocks(spec);
  sample.chains.resize(static_cast<std::size_t>(config.chains));
  std::vector<std::exception_ptr> errors(sample.chains.size());

#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < config.chains; ++c) {
    try {
      Chain chain(data, spec, prior, config, sample.blocks, init, c);
      sample.chains[static_cast<std::size_t>(c)] = chain.run();
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t c = 0; c < sample.chains.size(); ++c)
    for (std::size_t b = 0; b < sample.blocks.size(); ++b) {
      const double rate = sample.chains[c].acceptance[b];
      if (rate < 0.1 || rate > 0.6) {
        std::ostringstream os;
        os << "chain " << c << " block " << sample.blocks[b].name() << " acceptance " << rate
           << " outside [0.1, 0.6]";
        sample.warnings.push_back(os.str());
      }
    }
  return sample;
}

}  // namespace msml
