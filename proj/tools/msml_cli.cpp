// msml: command-line front end for fitting, comparing and diagnosing
// multinomial logit and Markov-switching multinomial logit models.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "msml/correlation.hpp"
#include "msml/diagnostics.hpp"
#include "msml/io.hpp"
#include "msml/mle.hpp"
#include "msml/model_selection.hpp"
#include "msml/posterior.hpp"
#include "msml/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace msml;

namespace {

enum Exit { kOk = 0, kUsage = 2, kIngest = 3, kFit = 4, kDiagnostic = 5 };

// Failure tagged with the stage that raised it and the exit code to use.
struct StageError : std::runtime_error {
  StageError(std::string stage, int code, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), code(code) {}
  int code;
};

template <class F>
auto stage(const std::string& name, int code, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, code, e.what());
  }
}

struct Common {
  std::uint64_t seed = 1;
  bool seed_set = false;
  int chains = 4;
  int burnin = 1000;
  int keep = 2000;
  int thin = 1;
  std::string out = "out";
  std::string config;
  double beta_sd = 100.0;
  int gof_replicates = 10000;

  McmcConfig mcmc() const {
    McmcConfig c;
    c.chains = chains;
    c.burnin = burnin;
    c.keep = keep;
    c.thin = thin;
    c.seed = seed;
    return c;
  }
  PriorSpec prior() const {
    PriorSpec p;
    p.beta_sd = beta_sd;
    return p;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master RNG seed (env MSML_SEED if unset)")
      ->each([&c](const std::string&) { c.seed_set = true; });
  app->add_option("--chains", c.chains, "MCMC chains")->check(CLI::PositiveNumber);
  app->add_option("--burnin", c.burnin, "burn-in sweeps per chain")->check(CLI::NonNegativeNumber);
  app->add_option("--keep", c.keep, "stored draws per chain")->check(CLI::PositiveNumber);
  app->add_option("--thin", c.thin, "thinning interval")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--config", c.config, "run configuration (INI with [mcmc], [prior], [gof])");
}

// Config file values apply first; explicit flags win. The seed may also
// come from MSML_SEED.
void resolve(CLI::App* app, Common& c) {
  if (!c.config.empty()) {
    boost::property_tree::ptree t;
    try {
      boost::property_tree::read_ini(c.config, t);
    } catch (const std::exception& e) {
      throw StageError("config", kUsage, e.what());
    }
    auto take = [&](const char* key, const char* flag, auto& dst) {
      using T = std::decay_t<decltype(dst)>;
      if (app->count(flag) == 0)
        if (auto v = t.get_optional<T>(key)) dst = *v;
    };
    take("mcmc.chains", "--chains", c.chains);
    take("mcmc.burnin", "--burnin", c.burnin);
    take("mcmc.keep", "--keep", c.keep);
    take("mcmc.thin", "--thin", c.thin);
    if (!c.seed_set)
      if (auto v = t.get_optional<std::uint64_t>("mcmc.seed")) {
        c.seed = *v;
        c.seed_set = true;
      }
    if (auto v = t.get_optional<double>("prior.beta_sd")) c.beta_sd = *v;
    if (auto v = t.get_optional<int>("gof.replicates")) c.gof_replicates = *v;
  }
  if (!c.seed_set)
    if (const char* env = std::getenv("MSML_SEED")) c.seed = std::strtoull(env, nullptr, 10);
}

// Creates the output directory on first use.
std::string out_path(const Common& c, const std::string& file) {
  fs::create_directories(c.out);
  return (fs::path(c.out) / file).string();
}

json num(double v) { return std::isfinite(v) ? json(sig6(v)) : json(nullptr); }

struct Loaded {
  Schema schema;
  Dataset data;
};

Loaded load(const std::string& data_path, const std::string& schema_path) {
  return stage("ingest", kIngest, [&] {
    Loaded l;
    l.schema = read_schema(schema_path);
    l.data = ingest(data_path, l.schema);
    std::cerr << "ingest: " << summarize_dataset(l.data).text() << "\n";
    return l;
  });
}

std::string param_label(const ParamRef& r, const Schema& s) {
  switch (r.kind) {
    case ParamRef::Kind::P01: return "p01";
    case ParamRef::Kind::P10: return "p10";
    case ParamRef::Kind::Beta: break;
  }
  const std::string lbl = s.coef_label(r.outcome, r.covariate);
  if (r.shared) return "beta[" + lbl + "]";
  return (r.state == 0 ? "beta0[" : "beta1[") + lbl + "]";
}

std::vector<std::string> param_labels(const ModelSpec& spec, const Schema& s) {
  std::vector<std::string> out;
  for (const auto& r : continuous_parameters(spec)) out.push_back(param_label(r, s));
  return out;
}

json spec_json(const ModelSpec& spec, const Schema& s) {
  json j = json::object();
  for (int i = 0; i < spec.outcomes - 1; ++i)
    for (int d = 0; d < spec.dim; ++d) j[s.coef_label(i, d)] = to_string(spec.at(i, d));
  return j;
}

// ---- fits ------------------------------------------------------------------

struct MlFitResult {
  ModelSpec selected;
  MleFit fit;
};

MlFitResult run_fit_ml(const Loaded& l, bool select, double alpha) {
  return stage("fit-ml", kFit, [&] {
    MlFitResult r;
    const ModelSpec full = ModelSpec::full(l.data.outcomes(), l.data.dim(), false);
    r.selected = select ? select_covariates(l.data, full, {}, alpha) : full;
    r.fit = fit_ml(l.data, r.selected);
    return r;
  });
}

void write_ml_table(const std::string& path, const MleFit& fit, const Schema& s) {
  std::vector<ParamRow> rows;
  for (auto [i, d] : fit.index) {
    const auto [lo, hi] = confidence_interval95(fit, i, d);
    rows.push_back({"beta[" + s.coef_label(i, d) + "]", fit.beta_hat(i, d), lo, hi});
  }
  write_param_table(path, rows);
}

json ml_json(const MleFit& fit, const Schema& s) {
  json j;
  j["loglik"] = num(fit.loglik);
  j["aic"] = num(fit.aic);
  j["parameters"] = fit.K;
  j["iterations"] = fit.iterations;
  json coefs = json::object();
  for (auto [i, d] : fit.index) {
    const WaldTest w = wald_t(fit, i, d);
    coefs[s.coef_label(i, d)] = {{"estimate", num(fit.beta_hat(i, d))},
                                 {"se", num(fit.se(i, d))},
                                 {"t", num(w.t)},
                                 {"p", num(w.p)}};
  }
  j["coefficients"] = coefs;
  j["spec"] = spec_json(fit.spec, s);
  return j;
}

// Emits parameter table, draws and (for switching fits) the state series.
void write_posterior_files(const Common& c, const std::string& prefix, const PosteriorSample& sample,
                           const Schema& s) {
  const auto names = param_labels(sample.spec, s);
  std::vector<ParamRow> rows;
  const auto cis = summarize(sample, 0.95);
  for (std::size_t k = 0; k < cis.size(); ++k) rows.push_back({names[k], cis[k].mean, cis[k].lower, cis[k].upper});
  if (sample.spec.switching) {
    for (const auto& ci : stationary_intervals(sample, 0.95)) rows.push_back({ci.name, ci.mean, ci.lower, ci.upper});
    write_state_series(out_path(c, prefix + "_states.csv"), state_series(sample));
  }
  write_param_table(out_path(c, prefix + "_params.csv"), rows);
  write_draws(out_path(c, prefix + "_draws.csv"), sample, names);
}

json posterior_json(const PosteriorSample& sample, const Dataset& data, const Schema& s,
                    std::uint64_t seed, std::optional<GofResult> gof) {
  json j;
  const MarginalLik ml = harmonic_mean_log_ml(sample, seed);
  j["log_marginal_likelihood"] = num(ml.log_ml);
  j["log_marginal_likelihood_ci95"] = {num(ml.lower), num(ml.upper)};
  const auto lls = sample.pooled_loglik();
  j["max_observed_loglik"] = num(*std::max_element(lls.begin(), lls.end()));
  j["draws"] = sample.total_draws();

  const ConvergenceSummary conv = stage("diagnostics", kDiagnostic, [&] { return convergence(sample); });
  j["max_psrf"] = num(conv.max_psrf);
  j["mpsrf"] = num(conv.mpsrf);

  json acc = json::object();
  for (std::size_t b = 0; b < sample.blocks.size(); ++b) {
    double m = 0.0;
    for (const auto& ch : sample.chains) m += ch.acceptance[b];
    std::string name = sample.blocks[b].name();
    acc[name] = num(m / static_cast<double>(sample.chains.size()));
  }
  j["acceptance"] = acc;

  if (sample.spec.switching) {
    const auto st = stationary_intervals(sample, 0.95);
    j["p0bar"] = {{"mean", num(st[0].mean)}, {"lower", num(st[0].lower)}, {"upper", num(st[0].upper)}};
    j["p1bar"] = {{"mean", num(st[1].mean)}, {"lower", num(st[1].lower)}, {"upper", num(st[1].upper)}};
  }
  const auto avg = averaged_outcome_probs(sample, data);
  for (int st = 0; st < (sample.spec.switching ? 2 : 1); ++st) {
    json p = json::object();
    for (std::size_t i = 0; i < s.outcomes.size(); ++i) p[s.outcomes[i]] = num(avg[static_cast<std::size_t>(st)][i]);
    j[sample.spec.switching ? "outcome_probs_state" + std::to_string(st) : "outcome_probs"] = p;
  }
  if (gof) {
    j["gof_p"] = num(gof->p_value);
    j["gof_chi2"] = num(gof->chi2_observed);
    j["gof_cells"] = gof->cells;
  }
  j["spec"] = spec_json(sample.spec, s);
  if (!sample.warnings.empty()) j["warnings"] = sample.warnings;
  return j;
}

GofResult run_gof(const PointModel& m, const Dataset& data, const Common& c) {
  return stage("gof", kDiagnostic, [&] {
    GofOptions o;
    o.replicates = c.gof_replicates;
    o.seed = c.seed;
    return gof_pvalue(m, data, o);
  });
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

// ---- generate ----------------------------------------------------------------

struct Truth {
  ModelSpec spec;
  Theta theta;
  GeneratorConfig gen;
};

std::vector<double> parse_row(const std::string& s) {
  std::vector<double> v;
  for (const auto& f : split_csv_line(s)) v.push_back(std::stod(f));
  return v;
}

CovariateSampler parse_sampler(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw std::invalid_argument("empty covariate sampler");
  if (parts[0] == "const") return CovariateSampler::constant(parts.size() > 1 ? std::stod(parts[1]) : 1.0);
  if (parts[0] == "bernoulli" && parts.size() == 2) return CovariateSampler::bernoulli(std::stod(parts[1]));
  if (parts[0] == "uniform" && parts.size() == 3)
    return CovariateSampler::uniform(std::stod(parts[1]), std::stod(parts[2]));
  throw std::invalid_argument("bad covariate sampler '" + s + "'");
}

// Default generating model: three outcomes, five covariates, clearly
// distinct coefficients in the two states.
Truth default_truth(bool switching) {
  Truth t;
  t.spec = ModelSpec::full(3, 5, switching);
  t.theta = Theta::zeros(t.spec, 208);
  t.theta.beta0.resize(2, 5);
  t.theta.beta0 << -1.0, 0.8, -0.5, 0.6, 0.0,
                   0.5, -0.4, 0.7, -0.8, 0.5;
  if (switching) {
    t.theta.beta1.resize(2, 5);
    t.theta.beta1 << 0.6, -0.6, 0.5, -0.6, 0.8,
                     -0.7, 0.6, -0.5, 0.9, -0.6;
    t.theta.p01 = 0.1;
    t.theta.p10 = 0.25;
  } else {
    t.theta.beta1 = t.theta.beta0;
  }
  t.gen.periods = 208;
  t.gen.records_per_period = 100;
  t.gen.covariates = {CovariateSampler::constant(), CovariateSampler::bernoulli(0.3),
                      CovariateSampler::bernoulli(0.5), CovariateSampler::uniform(0, 1),
                      CovariateSampler::uniform(-1, 1)};
  return t;
}

// INI: [model] switching, p01, p10; [beta0]/[beta1] one row per non-base
// outcome (y1 = ..., y2 = ...); [generator] periods, records_per_period or
// poisson_rate, covariates = const, bernoulli:0.3, uniform:0:1
Truth read_truth(const std::string& path) {
  boost::property_tree::ptree t;
  boost::property_tree::read_ini(path, t);
  Truth tr;
  const bool switching = t.get<bool>("model.switching", true);
  tr.gen.periods = t.get<int>("generator.periods");
  tr.gen.records_per_period = t.get<int>("generator.records_per_period", 0);
  tr.gen.poisson_rate = t.get<double>("generator.poisson_rate", 0.0);
  tr.gen.covariates.clear();
  for (const auto& s : split_csv_line(t.get<std::string>("generator.covariates")))
    tr.gen.covariates.push_back(parse_sampler(s));
  auto read_beta = [&](const std::string& sec) {
    std::vector<std::vector<double>> rows;
    for (const auto& [k, v] : t.get_child(sec)) rows.push_back(parse_row(v.data()));
    if (rows.empty()) throw std::invalid_argument("[" + sec + "] has no rows");
    Coefficients b(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows[0].size()) throw std::invalid_argument("[" + sec + "] rows differ in length");
      for (std::size_t d = 0; d < rows[i].size(); ++d) b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
    }
    return b;
  };
  const Coefficients b0 = read_beta("beta0");
  const Coefficients b1 = switching ? read_beta("beta1") : b0;
  const int I = static_cast<int>(b0.rows()) + 1, D = static_cast<int>(b0.cols());
  tr.spec = ModelSpec::full(I, D, switching);
  for (int i = 0; i < I - 1; ++i)
    for (int d = 0; d < D; ++d) {
      const bool z0 = b0(i, d) == 0.0, z1 = b1(i, d) == 0.0;
      if (d == 0) continue;
      if (z0 && z1) tr.spec.set(i, d, Inclusion::Excluded);
      else if (switching && b0(i, d) == b1(i, d)) tr.spec.set(i, d, Inclusion::Shared);
      else if (switching && z1) tr.spec.set(i, d, Inclusion::State0Only);
      else if (switching && z0) tr.spec.set(i, d, Inclusion::State1Only);
    }
  tr.theta = Theta::zeros(tr.spec, tr.gen.periods);
  tr.theta.beta0 = b0;
  tr.theta.beta1 = b1;
  tr.theta.p01 = t.get<double>("model.p01", 0.5);
  tr.theta.p10 = t.get<double>("model.p10", 0.5);
  return tr;
}

int cmd_generate(const Common& c, const std::string& truth_path, bool nonswitching, int periods,
                 int per_period) {
  Truth tr = stage("generate", kUsage, [&] { return truth_path.empty() ? default_truth(!nonswitching) : read_truth(truth_path); });
  if (periods > 0) tr.gen.periods = periods;
  if (per_period >= 0) {
    tr.gen.records_per_period = per_period;
    tr.gen.poisson_rate = 0.0;
  }
  tr.theta.states.assign(tr.spec.switching ? static_cast<std::size_t>(tr.gen.periods) : 0, 0);
  Rng rng = make_rng(c.seed, 0);
  const SyntheticData sd = stage("generate", kFit, [&] { return generate(tr.spec, tr.theta, tr.gen, rng); });
  Schema schema = Schema::generic(tr.gen.periods, sd.data.outcomes(), sd.data.dim());
  for (std::size_t d = 1; d < tr.gen.covariates.size(); ++d)
    if (tr.gen.covariates[d].kind == CovariateSampler::Kind::Bernoulli)
      schema.covariates[d - 1].role = CovariateRole::Dummy;
  write_dataset_csv(out_path(c, "data.csv"), sd.data, schema);
  write_schema(out_path(c, "schema.ini"), schema);
  std::vector<double> s(sd.states.begin(), sd.states.end());
  write_series(out_path(c, "true_states.csv"), s, "state");
  std::cerr << "generate: " << summarize_dataset(sd.data).text() << "\n";
  return kOk;
}

// ---- verbs -------------------------------------------------------------------

int cmd_fit_ml(const Common& c, const std::string& data, const std::string& schema, bool select,
               double alpha, bool mcmc) {
  const Loaded l = load(data, schema);
  const MlFitResult r = run_fit_ml(l, select, alpha);
  write_ml_table(out_path(c, "ml_mle_params.csv"), r.fit, l.schema);
  json rep;
  rep["ml_mle"] = ml_json(r.fit, l.schema);
  if (mcmc) {
    const PosteriorSample s = stage("fit-ml", kFit, [&] { return run_chains(l.data, r.selected, c.prior(), c.mcmc()); });
    write_posterior_files(c, "ml_mcmc", s, l.schema);
    rep["ml_mcmc"] = posterior_json(s, l.data, l.schema, c.seed, std::nullopt);
  }
  write_json(out_path(c, "report.json"), rep);
  std::cout << rep.dump(2) << "\n";
  return kOk;
}

int cmd_fit_msml(const Common& c, const std::string& data, const std::string& schema, bool restrict) {
  const Loaded l = load(data, schema);
  const ModelSpec spec = ModelSpec::full(l.data.outcomes(), l.data.dim(), true);
  json rep;
  PosteriorSample sample;
  if (restrict) {
    RestrictionResult rr = stage("fit-msml", kFit, [&] { return restrict_workflow(l.data, spec, c.prior(), c.mcmc()); });
    rep["collapsed"] = rr.collapsed;
    if (rr.collapsed) rep["collapse_reason"] = rr.collapse_reason;
    sample = std::move(rr.sample);
  } else {
    sample = stage("fit-msml", kFit, [&] { return run_chains(l.data, spec, c.prior(), c.mcmc()); });
  }
  write_posterior_files(c, "msml", sample, l.schema);
  rep["msml"] = posterior_json(sample, l.data, l.schema, c.seed, std::nullopt);
  write_json(out_path(c, "report.json"), rep);
  std::cout << rep.dump(2) << "\n";
  return kOk;
}

int cmd_compare(const Common& c, const std::string& data, const std::string& schema,
                std::optional<double> lml_a, std::optional<double> lml_b) {
  json rep;
  if (lml_a && lml_b) {
    MarginalLik a{*lml_a, *lml_a, *lml_a, 0}, b{*lml_b, *lml_b, *lml_b, 0};
    rep["log_bayes_factor"] = num(bayes_factor(a, b));
    std::cout << rep.dump(2) << "\n";
    return kOk;
  }
  const Loaded l = load(data, schema);
  const ModelSpec ml_spec = ModelSpec::full(l.data.outcomes(), l.data.dim(), false);
  const PosteriorSample ml = stage("compare", kFit, [&] { return run_chains(l.data, ml_spec, c.prior(), c.mcmc()); });
  const PosteriorSample ms = stage("compare", kFit, [&] { return run_chains(l.data, ml_spec.as_switching(), c.prior(), c.mcmc()); });
  const MarginalLik a = harmonic_mean_log_ml(ml, c.seed), b = harmonic_mean_log_ml(ms, c.seed);
  rep["ml_log_marginal_likelihood"] = num(a.log_ml);
  rep["msml_log_marginal_likelihood"] = num(b.log_ml);
  rep["log_bayes_factor"] = num(bayes_factor(a, b));
  write_json(out_path(c, "compare.json"), rep);
  std::cout << rep.dump(2) << "\n";
  return kOk;
}

int cmd_gof(const Common& c, const std::string& data, const std::string& schema, const std::string& model) {
  const Loaded l = load(data, schema);
  PointModel pm;
  if (model == "ml") {
    pm = PointModel::from_mle(run_fit_ml(l, false, 0.05).fit);
  } else {
    const ModelSpec spec = ModelSpec::full(l.data.outcomes(), l.data.dim(), true);
    const PosteriorSample s = stage("gof", kFit, [&] { return run_chains(l.data, spec, c.prior(), c.mcmc()); });
    pm = PointModel::from_posterior(s);
  }
  const GofResult g = run_gof(pm, l.data, c);
  json rep{{"model", model}, {"chi2", num(g.chi2_observed)}, {"p_value", num(g.p_value)},
           {"replicates", g.replicates}, {"cells", g.cells}};
  std::cout << rep.dump(2) << "\n";
  return kOk;
}

int cmd_correlate(const Common& c, const std::vector<std::string>& states,
                  const std::vector<std::string>& externals, const std::string& mask) {
  auto split_named = [](const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) return std::pair{fs::path(s).stem().string(), s};
    return std::pair{s.substr(0, eq), s.substr(eq + 1)};
  };
  std::vector<NamedStates> st;
  std::vector<NamedSeries> ex;
  stage("ingest", kIngest, [&] {
    for (const auto& s : states) {
      auto [n, p] = split_named(s);
      st.push_back({n, read_state_series(p)});
    }
    for (const auto& s : externals) {
      auto [n, p] = split_named(s);
      ex.push_back({n, read_series(p)});
    }
    return 0;
  });
  std::optional<std::vector<std::size_t>> idx;
  if (!mask.empty()) {
    // 1-based inclusive ranges, e.g. "1-9,44-61".
    idx.emplace();
    for (const auto& part : split_csv_line(mask)) {
      const auto dash = part.find('-');
      const long a = std::stol(part.substr(0, dash));
      const long b = dash == std::string::npos ? a : std::stol(part.substr(dash + 1));
      for (long t = a; t <= b; ++t) idx->push_back(static_cast<std::size_t>(t - 1));
    }
  }
  const CorrMatrix m = stage("correlate", kDiagnostic, [&] { return corr_matrix(st, ex, idx); });
  write_corr_matrix(out_path(c, "correlations.csv"), m);
  for (std::size_t r = 0; r < m.row_names.size(); ++r) {
    std::cout << m.row_names[r];
    for (double v : m.values[r]) std::cout << "\t" << sig6(v);
    std::cout << "\n";
  }
  return kOk;
}

int cmd_pipeline(const Common& c, const std::string& data, const std::string& schema, double alpha) {
  const Loaded l = load(data, schema);
  json rep;
  const IngestSummary sum = summarize_dataset(l.data);
  rep["dataset"] = {{"periods", sum.periods}, {"outcomes", l.schema.outcomes}, {"records", sum.records},
                    {"outcome_counts", sum.outcome_counts}};

  std::cerr << "pipeline: ML by MLE with covariate selection\n";
  const MlFitResult mle = run_fit_ml(l, true, alpha);
  write_ml_table(out_path(c, "ml_mle_params.csv"), mle.fit, l.schema);
  json ml_mle = ml_json(mle.fit, l.schema);
  ml_mle["gof_p"] = num(run_gof(PointModel::from_mle(mle.fit), l.data, c).p_value);
  rep["ml_mle"] = ml_mle;

  std::cerr << "pipeline: ML by MCMC\n";
  const PosteriorSample ml = stage("fit-ml", kFit, [&] { return run_chains(l.data, mle.selected, c.prior(), c.mcmc()); });
  write_posterior_files(c, "ml_mcmc", ml, l.schema);
  rep["ml_mcmc"] = posterior_json(ml, l.data, l.schema, c.seed, run_gof(PointModel::from_posterior(ml), l.data, c));

  std::cerr << "pipeline: MSML with restriction\n";
  RestrictionResult rr = stage("fit-msml", kFit, [&] {
    return restrict_workflow(l.data, mle.selected.as_switching(), c.prior(), c.mcmc());
  });
  write_posterior_files(c, "msml", rr.sample, l.schema);
  json ms = posterior_json(rr.sample, l.data, l.schema, c.seed,
                           run_gof(PointModel::from_posterior(rr.sample), l.data, c));
  ms["collapsed"] = rr.collapsed;
  if (rr.collapsed) ms["collapse_reason"] = rr.collapse_reason;
  json passes = json::array();
  for (const auto& p : rr.passes) passes.push_back({{"a", p.a}, {"spec", spec_json(p.after, l.schema)}});
  ms["restriction_passes"] = passes;
  rep["msml"] = ms;

  const MarginalLik a = harmonic_mean_log_ml(ml, c.seed), b = harmonic_mean_log_ml(rr.sample, c.seed);
  rep["log_bayes_factor_msml_vs_ml"] = num(bayes_factor(a, b));
  write_json(out_path(c, "report.json"), rep);
  std::cout << rep.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-switching multinomial logit estimation"};
  app.require_subcommand(1);
  Common c;
  std::string data, schema, truth, model = "msml", mask;
  bool select = false, mcmc = false, restrict = false, nonswitching = false;
  double alpha = 0.05;
  int periods = 0, per_period = -1;
  std::optional<double> lml_a, lml_b;
  std::vector<std::string> states, externals;

  auto with_data = [&](CLI::App* s) {
    s->add_option("--data", data, "dataset CSV")->required();
    s->add_option("--schema", schema, "schema INI")->required();
    s->add_option("--gof-replicates", c.gof_replicates, "Monte Carlo replicates for the chi-square test");
    s->add_option("--prior-sd", c.beta_sd, "prior standard deviation of coefficients");
  };

  auto* gen = app.add_subcommand("generate", "simulate a dataset from a known model");
  add_common(gen, c);
  gen->add_option("--truth", truth, "generating model INI (default: built-in 3-outcome model)");
  gen->add_flag("--no-switching", nonswitching, "generate from the single-state model");
  gen->add_option("--periods", periods, "override number of periods");
  gen->add_option("--per-period", per_period, "override records per period");

  auto* fml = app.add_subcommand("fit-ml", "multinomial logit by maximum likelihood");
  add_common(fml, c);
  with_data(fml);
  fml->add_flag("--select", select, "backward covariate selection (t-test and AIC)");
  fml->add_option("--alpha", alpha, "selection significance level");
  fml->add_flag("--mcmc", mcmc, "also estimate the selected model by MCMC");

  auto* fms = app.add_subcommand("fit-msml", "Markov-switching multinomial logit by MCMC");
  add_common(fms, c);
  with_data(fms);
  fms->add_flag("--restrict", restrict, "run the credible-interval restriction passes");

  auto* cmp = app.add_subcommand("compare", "log Bayes factor of MSML over ML");
  add_common(cmp, c);
  cmp->add_option("--data", data, "dataset CSV");
  cmp->add_option("--schema", schema, "schema INI");
  cmp->add_option("--prior-sd", c.beta_sd, "prior standard deviation of coefficients");
  cmp->add_option("--log-ml-a", lml_a, "log marginal likelihood of model a (skips fitting)");
  cmp->add_option("--log-ml-b", lml_b, "log marginal likelihood of model b (skips fitting)");

  auto* gof = app.add_subcommand("gof", "Pearson chi-square goodness of fit by simulation");
  add_common(gof, c);
  with_data(gof);
  gof->add_option("--model", model, "ml or msml")->check(CLI::IsMember({"ml", "msml"}));

  auto* cor = app.add_subcommand("correlate", "weighted correlations of state series");
  add_common(cor, c);
  cor->add_option("--states", states, "state-series CSV files, optionally name=path")->required();
  cor->add_option("--external", externals, "external series CSV files, optionally name=path");
  cor->add_option("--mask", mask, "1-based period ranges to include, e.g. 1-9,44-61");

  auto* pip = app.add_subcommand("pipeline", "ML by MLE, ML by MCMC, MSML with restriction, comparison");
  add_common(pip, c);
  with_data(pip);
  pip->add_option("--alpha", alpha, "selection significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    resolve(sub, c);
    if (sub == gen) return cmd_generate(c, truth, nonswitching, periods, per_period);
    if (sub == fml) return cmd_fit_ml(c, data, schema, select, alpha, mcmc);
    if (sub == fms) return cmd_fit_msml(c, data, schema, restrict);
    if (sub == cmp) {
      if (!(lml_a && lml_b) && (data.empty() || schema.empty())) {
        std::cerr << "compare: need --data and --schema, or both --log-ml-a and --log-ml-b\n";
        return kUsage;
      }
      return cmd_compare(c, data, schema, lml_a, lml_b);
    }
    if (sub == gof) return cmd_gof(c, data, schema, model);
    if (sub == cor) return cmd_correlate(c, states, externals, mask);
    if (sub == pip) return cmd_pipeline(c, data, schema, alpha);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFit;
  }
  return kUsage;
}
