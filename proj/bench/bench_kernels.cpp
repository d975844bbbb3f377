// Serial reference kernels against their OpenMP counterparts, plus whole
// chain and GOF runs at one thread vs all threads.

#include <omp.h>

#include <benchmark/benchmark.h>

#include "msml/diagnostics.hpp"
#include "msml/kernels.hpp"
#include "msml/synthetic.hpp"

namespace {

struct Fixture {
  msml::ModelSpec spec = msml::ModelSpec::full(3, 5, true);
  msml::Theta truth;
  msml::Dataset data;
  std::vector<std::uint8_t> states;

  explicit Fixture(int periods) {
    truth = msml::Theta::zeros(spec, periods);
    truth.beta0 << -1.0, 0.8, -0.5, 0.6, 0.0, 0.5, -0.4, 0.7, -0.8, 0.5;
    truth.beta1 << 0.6, -0.6, 0.5, -0.6, 0.8, -0.7, 0.6, -0.5, 0.9, -0.6;
    truth.p01 = 0.1;
    truth.p10 = 0.25;
    msml::GeneratorConfig g;
    g.periods = periods;
    g.records_per_period = 100;
    g.covariates = {msml::CovariateSampler::constant(), msml::CovariateSampler::bernoulli(0.3),
                    msml::CovariateSampler::bernoulli(0.5), msml::CovariateSampler::uniform(0, 1),
                    msml::CovariateSampler::uniform(-1, 1)};
    msml::Rng rng = msml::make_rng(11, 0);
    auto sd = msml::generate(spec, truth, g, rng);
    data = std::move(sd.data);
    states = std::move(sd.states);
  }
};

const Fixture& fixture() {
  static const Fixture f(208);
  return f;
}

void BM_PeriodLoglikSerial(benchmark::State& st) {
  const auto& f = fixture();
  std::vector<double> out(static_cast<std::size_t>(f.data.periods()));
  for (auto _ : st) {
    msml::kernels::period_loglik_serial(f.data, f.truth.beta0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_PeriodLoglikParallel(benchmark::State& st) {
  const auto& f = fixture();
  std::vector<double> out(static_cast<std::size_t>(f.data.periods()));
  for (auto _ : st) {
    msml::kernels::period_loglik_parallel(f.data, f.truth.beta0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_StateLoglikSerial(benchmark::State& st) {
  const auto& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(msml::kernels::state_loglik_serial(f.data, f.truth.beta1, f.states, 1));
}

void BM_StateLoglikParallel(benchmark::State& st) {
  const auto& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(msml::kernels::state_loglik_parallel(f.data, f.truth.beta1, f.states, 1));
}

// range(0) = thread count (0 means the OpenMP default).
void BM_Chains(benchmark::State& st) {
  const auto& f = fixture();
  const int saved = omp_get_max_threads();
  if (st.range(0) > 0) omp_set_num_threads(static_cast<int>(st.range(0)));
  msml::McmcConfig cfg;
  cfg.chains = 4;
  cfg.burnin = 50;
  cfg.keep = 50;
  for (auto _ : st) {
    auto s = msml::run_chains(f.data, f.spec, {}, cfg);
    benchmark::DoNotOptimize(s.chains.data());
  }
  omp_set_num_threads(saved);
}

void BM_Gof(benchmark::State& st) {
  const auto& f = fixture();
  const int saved = omp_get_max_threads();
  if (st.range(0) > 0) omp_set_num_threads(static_cast<int>(st.range(0)));
  msml::PointModel m{true, f.truth.beta0, f.truth.beta1, f.truth.p01, f.truth.p10};
  msml::GofOptions o;
  o.replicates = 200;
  for (auto _ : st) benchmark::DoNotOptimize(msml::gof_pvalue(m, f.data, o).p_value);
  omp_set_num_threads(saved);
}

}  // namespace

BENCHMARK(BM_PeriodLoglikSerial);
BENCHMARK(BM_PeriodLoglikParallel);
BENCHMARK(BM_StateLoglikSerial);
BENCHMARK(BM_StateLoglikParallel);
BENCHMARK(BM_Chains)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Gof)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
