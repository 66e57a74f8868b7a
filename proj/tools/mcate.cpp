// Command-line driver: batch experiment runs, result tables and plots, a
// quick self-check suite and surrogate data generation.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 partial failures
// (grid rows that errored, or failed self-checks).

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcate/egs.hpp"
#include "mcate/experiment.hpp"
#include "mcate/metrics.hpp"
#include "mcate/monte_carlo.hpp"
#include "mcate/nuisance.hpp"
#include "mcate/r_linear.hpp"
#include "mcate/rng.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

int run_verb(const std::string& config_path) {
  mcate::ExperimentConfig config;
  try {
    config = mcate::load_experiment_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  mcate::ExperimentResult result;
  try {
    result = mcate::run_experiment(config);
  } catch (const std::exception& e) {
    std::cerr << "run error: " << e.what() << "\n";
    return 1;
  }
  int failures = 0;
  for (const auto& row : result.rows) {
    if (!row.ok) {
      ++failures;
      std::cerr << "row failed: " << row.learner << "/" << row.base << "/seed " << row.seed
                << ": " << row.error << "\n";
    }
  }
  std::cout << "wrote " << config.output_dir << "/results.csv and timings.csv ("
            << result.rows.size() << " rows, " << failures << " failed)\n";
  if (failures < static_cast<int>(result.rows.size())) {
    std::cout << "\n" << mcate::emit_table(result.rows, "base");
  }
  return failures == 0 ? 0 : 2;
}

// A sweep-shaped view of result rows: distinct K values on the x axis.
mcate::KSweepResult sweep_from_rows(const std::vector<mcate::ResultRow>& rows) {
  mcate::KSweepResult sweep;
  std::vector<int> ks;
  for (const auto& row : rows) {
    if (row.ok) ks.push_back(row.K);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.empty()) throw std::invalid_argument("plot: no successful rows");
  sweep.K_list = ks;
  for (const mcate::Learner learner : mcate::all_learners()) {
    const std::string name = mcate::learner_name(learner);
    bool present = false;
    for (const auto& row : rows) {
      if (row.ok && row.learner == name) present = true;
    }
    if (present) sweep.learners.push_back(learner);
  }
  for (const int K : sweep.K_list) {
    for (const mcate::Learner learner : sweep.learners) {
      const std::string name = mcate::learner_name(learner);
      std::vector<double> values;
      for (const auto& row : rows) {
        if (row.ok && row.K == K && row.learner == name) values.push_back(row.mpehe);
      }
      mcate::KSweepCell cell;
      cell.K = K;
      cell.learner = learner;
      if (values.empty()) {
        cell.per_seed_mpehe = Eigen::VectorXd::Zero(1);
        cell.mean_mpehe = 0.0;
      } else {
        cell.per_seed_mpehe =
            Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<int>(values.size()));
        cell.mean_mpehe = cell.per_seed_mpehe.mean();
      }
      sweep.cells.push_back(std::move(cell));
    }
  }
  return sweep;
}

bool report(const char* name, bool ok) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
  return ok;
}

// Quick algebraic self-checks; the full criterion suite lives in the tests.
int verify_verb() {
  using namespace mcate;
  bool all = true;

  {
    // Pseudo-outcome treatment expectations reproduce the effect pointwise.
    Rng rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int K = 1 + rng.uniform_int(5);
      const TreatmentLevels levels = TreatmentLevels::uniform_grid(K);
      std::vector<double> probs(levels.count());
      double total = 0.0;
      for (double& p : probs) total += (p = 0.2 + rng.uniform01());
      for (double& p : probs) p /= total;
      std::vector<double> mu(levels.count());
      for (double& v : mu) v = rng.uniform(-2.0, 2.0);

      ObservationalSample sample;
      sample.levels = levels;
      sample.covariates = Eigen::MatrixXd::Constant(levels.count(), 1, 0.3);
      sample.outcome.resize(levels.count());
      sample.treatment_idx.resize(levels.count());
      for (int t = 0; t < levels.count(); ++t) {
        sample.treatment_idx[t] = t;
        sample.outcome(t) = mu[t];
      }

      NuisanceSet nuis;
      nuis.clip_floor = 1e-6;
      nuis.num_levels = levels.count();
      nuis.gps_raw = [probs](const Eigen::VectorXd&) {
        return Eigen::Map<const Eigen::VectorXd>(probs.data(),
                                                 static_cast<int>(probs.size()));
      };
      nuis.mu.form = OutcomeModel::Form::Closed;
      nuis.mu.level_values = levels.values;
      nuis.mu.closed = [mu, levels](double t, const Eigen::VectorXd&) {
        for (int k = 0; k < levels.count(); ++k) {
          if (t == levels.value(k)) return mu[k];
        }
        throw std::invalid_argument("probe off grid");
      };

      for (int k = 1; k <= K; ++k) {
        const double tau = mu[k] - mu[0];
        for (auto fn : {&pseudo_outcome_m, &pseudo_outcome_dr, &pseudo_outcome_x}) {
          const Eigen::VectorXd z = fn(sample, nuis, k);
          double expectation = 0.0;
          for (int t = 0; t < levels.count(); ++t) expectation += probs[t] * z(t);
          worst = std::max(worst, std::abs(expectation - tau));
        }
      }
    }
    all &= report("pseudo-outcome treatment expectation equals the effect", worst < 1e-10);
  }

  {
    // Imputed-difference learner coincides with per-level regression.
    DgpConfig cfg;
    cfg.model = DgpModel::Linear;
    cfg.design = DgpDesign::Rct;
    cfg.n = 500;
    cfg.K = 3;
    cfg.seed = 11;
    const GeneratedData data = generate(cfg);
    FitAllOptions fit;
    fit.learners = {Learner::T, Learner::NaiveX};
    fit.base = RegressorSpec::linear_basis(BasisSpec::linear(1));
    Scenario scenario;
    scenario.outcome = Provenance::Estimated;  // both reuse the same level fits
    const auto estimates = fit_all(data.sample, &data.truth, scenario, fit);
    double worst = 0.0;
    for (int i = 0; i < data.sample.n(); ++i) {
      const Eigen::VectorXd x = data.sample.covariates.row(i).transpose();
      for (int k = 1; k <= cfg.K; ++k) {
        worst = std::max(worst, std::abs(estimates.at(Learner::T).predict(k, x) -
                                         estimates.at(Learner::NaiveX).predict(k, x)));
      }
    }
    all &= report("imputed-difference learner matches per-level regression", worst < 1e-8);
  }

  {
    // Residual-on-residual loss gradient agrees with finite differences.
    DgpConfig cfg;
    cfg.model = DgpModel::Linear;
    cfg.design = DgpDesign::PreferentialSelection;
    cfg.n = 300;
    cfg.K = 2;
    cfg.seed = 3;
    const GeneratedData data = generate(cfg);
    const NuisanceSet nuis = exact_nuisances(data.truth);
    const RLossSystem system = assemble_r_loss(data.sample, nuis, BasisSpec::linear(1));
    Rng rng(5);
    Eigen::VectorXd beta(system.A.rows());
    for (int i = 0; i < beta.size(); ++i) beta(i) = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd grad = r_loss_gradient(system, beta);
    const double h = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < beta.size(); ++i) {
      Eigen::VectorXd up = beta, down = beta;
      up(i) += h;
      down(i) -= h;
      const double fd = (r_loss(system, up) - r_loss(system, down)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - grad(i)) / std::max(1.0, std::abs(grad(i))));
    }
    all &= report("effect-loss gradient matches finite differences", worst < 1e-5);
  }

  {
    // Aggregate error metric arithmetic.
    Eigen::VectorXd per_k(2);
    per_k << 0.3, 0.4;
    const bool ok = std::abs(aggregate_mpehe(per_k) - std::sqrt(0.125)) < 1e-12;
    all &= report("aggregate error metric arithmetic", ok);
  }

  {
    // Per-level variance ratio arithmetic.
    Eigen::VectorXd a(2), b(2);
    a << 0.5, 0.5;
    b << 0.1, 0.9;
    const double ratio = t_learner_variance_prediction(a, b, 1);
    const bool ok = std::abs(ratio - (10.0 + 10.0 / 9.0) / 4.0) < 1e-12;
    all &= report("per-level regression variance ratio arithmetic", ok);
  }

  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-valued treatment effect estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment grid from a config file");
  run->add_option("config", config_path, "experiment config file")->required();

  std::string table_csv, table_out, group_by = "base";
  auto* table = app.add_subcommand("table", "render a results csv as a markdown table");
  table->add_option("results", table_csv, "results.csv from a run")->required();
  table->add_option("--group-by", group_by, "column axis: base, scenario or k");
  table->add_option("--out", table_out, "output path (default stdout)");

  std::string plot_csv, plot_out;
  auto* plot = app.add_subcommand("plot", "render a results csv as an SVG line chart over K");
  plot->add_option("results", plot_csv, "results.csv from a run")->required();
  plot->add_option("--out", plot_out, "output path (default stdout)");

  auto* verify = app.add_subcommand("verify", "run the quick theorem self-checks");

  std::string surrogate_out;
  std::uint64_t surrogate_seed = 0;
  auto* gen = app.add_subcommand("gen-egs-surrogate", "write the surrogate fracture table");
  gen->add_option("out", surrogate_out, "destination csv path")->required();
  gen->add_option("--seed", surrogate_seed, "jitter seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      return run_verb(config_path);
    }
    if (table->parsed()) {
      write_text(table_out, mcate::emit_table(mcate::read_results_csv(table_csv), group_by));
      return 0;
    }
    if (plot->parsed()) {
      write_text(plot_out,
                 mcate::emit_plot_svg(sweep_from_rows(mcate::read_results_csv(plot_csv))));
      return 0;
    }
    if (verify->parsed()) {
      return verify_verb();
    }
    if (gen->parsed()) {
      const mcate::FractureTable table_data = mcate::surrogate_fracture_model(surrogate_seed);
      mcate::export_fracture_csv(surrogate_out, table_data);
      std::cout << "wrote " << surrogate_out << " (" << table_data.n() << " rows)\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
