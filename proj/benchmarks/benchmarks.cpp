#include <benchmark/benchmark.h>

#include "mcate/egs.hpp"
#include "mcate/meta_learners.hpp"
#include "mcate/r_linear.hpp"
#include "mcate/synthetic.hpp"

using namespace mcate;

namespace {

DgpConfig config_for(int n, int K, DgpModel model = DgpModel::Linear) {
  DgpConfig cfg;
  cfg.model = model;
  cfg.design = DgpDesign::PreferentialSelection;
  cfg.n = n;
  cfg.K = K;
  cfg.sigma = 0.3;
  cfg.seed = 17;
  return cfg;
}

void BM_generate_linear(benchmark::State& state) {
  const DgpConfig cfg = config_for(static_cast<int>(state.range(0)), 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(cfg));
  }
}
BENCHMARK(BM_generate_linear)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_generate_hazard(benchmark::State& state) {
  const DgpConfig cfg = config_for(static_cast<int>(state.range(0)), 9, DgpModel::HazardRate);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(cfg));
  }
}
BENCHMARK(BM_generate_hazard)->Arg(1000)->Arg(4000);

void BM_pseudo_outcome_dr(benchmark::State& state) {
  const GeneratedData data = generate(config_for(static_cast<int>(state.range(0)), 9));
  const NuisanceSet nuis = exact_nuisances(data.truth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pseudo_outcome_dr(data.sample, nuis, 1));
  }
}
BENCHMARK(BM_pseudo_outcome_dr)->Arg(1000)->Arg(8000);

void BM_estimate_nuisances_per_level(benchmark::State& state) {
  const GeneratedData data = generate(config_for(static_cast<int>(state.range(0)), 4));
  NuisanceOptions options;
  options.base_spec = RegressorSpec::linear_basis(BasisSpec::linear(1));
  options.gps_spec = ProbabilitySpec::multinomial_logistic(BasisSpec::linear(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_nuisances(data.sample, options));
  }
}
BENCHMARK(BM_estimate_nuisances_per_level)->Arg(1000)->Arg(4000);

void BM_assemble_r_loss(benchmark::State& state) {
  const GeneratedData data = generate(config_for(2000, static_cast<int>(state.range(0))));
  const NuisanceSet nuis = exact_nuisances(data.truth);
  const BasisSpec basis = BasisSpec::linear(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_r_loss(data.sample, nuis, basis));
  }
}
BENCHMARK(BM_assemble_r_loss)->Arg(2)->Arg(9)->Arg(20);

void BM_solve_min_norm(benchmark::State& state) {
  const GeneratedData data = generate(config_for(2000, static_cast<int>(state.range(0))));
  const RLossSystem system =
      assemble_r_loss(data.sample, exact_nuisances(data.truth), BasisSpec::linear(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_min_norm(system));
  }
}
BENCHMARK(BM_solve_min_norm)->Arg(9)->Arg(20);

WeightedTrainingSet training_set(int n) {
  const GeneratedData data = generate(config_for(n, 4, DgpModel::HazardRate));
  WeightedTrainingSet set;
  set.inputs = data.sample.covariates;
  set.targets = data.sample.outcome;
  return set;
}

void BM_fit_tree(benchmark::State& state) {
  const WeightedTrainingSet set = training_set(static_cast<int>(state.range(0)));
  const RegressorSpec spec = RegressorSpec::regression_tree();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_regressor(spec, set));
  }
}
BENCHMARK(BM_fit_tree)->Arg(500)->Arg(2000);

void BM_fit_boosted(benchmark::State& state) {
  const WeightedTrainingSet set = training_set(static_cast<int>(state.range(0)));
  BoostParams params;
  params.rounds = 50;
  params.max_depth = 3;
  const RegressorSpec spec = RegressorSpec::gradient_boosted(params, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_regressor(spec, set));
  }
}
BENCHMARK(BM_fit_boosted)->Arg(500)->Arg(2000);

void BM_fit_all_exact(benchmark::State& state) {
  const GeneratedData data = generate(config_for(static_cast<int>(state.range(0)), 9));
  FitAllOptions fit;
  fit.learners = all_learners();
  fit.base = RegressorSpec::linear_basis(BasisSpec::linear(1));
  fit.seed = 17;
  Scenario scenario;
  scenario.outcome = Provenance::Estimated;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_all(data.sample, &data.truth, scenario, fit));
  }
}
BENCHMARK(BM_fit_all_exact)->Arg(1000)->Arg(4000);

void BM_egs_biased_sample(benchmark::State& state) {
  const FractureTable table = surrogate_fracture_model(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(biased_sample(table, static_cast<int>(state.range(0)), 3));
  }
}
BENCHMARK(BM_egs_biased_sample)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
