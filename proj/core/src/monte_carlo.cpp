#include "mcate/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "mcate/metrics.hpp"
#include "mcate/nuisance.hpp"
#include "mcate/parallel.hpp"

namespace mcate {
namespace {

WeightedTrainingSet rows_subset(const ObservationalSample& sample, const std::vector<int>& rows) {
  WeightedTrainingSet out;
  out.inputs.resize(static_cast<int>(rows.size()), sample.dim());
  out.targets.resize(static_cast<int>(rows.size()));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    out.inputs.row(i) = sample.covariates.row(rows[i]);
    out.targets(i) = sample.outcome(rows[i]);
  }
  return out;
}

Eigen::VectorXd ols_coefficients(const BasisSpec& basis, const WeightedTrainingSet& data) {
  return LinearBasisModel::fit(basis, data)->coefficients();
}

Eigen::VectorXd beta_draw(McLearner learner, const GeneratedData& data, const NuisanceSet& nuis,
                          const BasisSpec& basis, int target_k) {
  const ObservationalSample& sample = data.sample;
  const auto strata = split_by_treatment(sample);
  const auto require_stratum = [&](int level) -> const std::vector<int>& {
    if (strata[level].empty()) {
      throw std::runtime_error("mc_beta_distribution: stratum for level " +
                               std::to_string(level) + " is empty");
    }
    return strata[level];
  };

  switch (learner) {
    case McLearner::T: {
      const Eigen::VectorXd c0 = ols_coefficients(basis, rows_subset(sample, require_stratum(0)));
      const Eigen::VectorXd ck =
          ols_coefficients(basis, rows_subset(sample, require_stratum(target_k)));
      return ck - c0;
    }
    case McLearner::NaiveX: {
      WeightedTrainingSet base_set = rows_subset(sample, require_stratum(0));
      WeightedTrainingSet level_set = rows_subset(sample, require_stratum(target_k));
      const Eigen::VectorXd c0 = ols_coefficients(basis, base_set);
      const Eigen::VectorXd ck = ols_coefficients(basis, level_set);

      // Imputed-difference regressions sharing the level fits above.
      WeightedTrainingSet level_diff = level_set;
      for (int i = 0; i < level_diff.n(); ++i) {
        level_diff.targets(i) -= basis.evaluate(level_diff.inputs.row(i).transpose()).dot(c0);
      }
      WeightedTrainingSet base_diff = base_set;
      for (int i = 0; i < base_diff.n(); ++i) {
        base_diff.targets(i) =
            basis.evaluate(base_diff.inputs.row(i).transpose()).dot(ck) - base_diff.targets(i);
      }
      const Eigen::VectorXd gamma = ols_coefficients(basis, level_diff);
      const Eigen::VectorXd delta = ols_coefficients(basis, base_diff);

      double weight_sum = 0.0;
      for (int i = 0; i < sample.n(); ++i) {
        const Eigen::VectorXd probs = nuis.gps_raw(sample.covariates.row(i).transpose());
        const double total = probs(target_k) + probs(0);
        weight_sum += total > 0.0 ? probs(target_k) / total : 0.5;
      }
      const double w = weight_sum / sample.n();
      return w * gamma + (1.0 - w) * delta;
    }
    case McLearner::M:
    case McLearner::Dr:
    case McLearner::X: {
      Eigen::VectorXd pseudo;
      if (learner == McLearner::M) {
        pseudo = pseudo_outcome_m(sample, nuis, target_k);
      } else if (learner == McLearner::Dr) {
        pseudo = pseudo_outcome_dr(sample, nuis, target_k);
      } else {
        pseudo = pseudo_outcome_x(sample, nuis, target_k);
      }
      WeightedTrainingSet all;
      all.inputs = sample.covariates;
      all.targets = std::move(pseudo);
      return ols_coefficients(basis, all);
    }
  }
  throw std::logic_error("mc_beta_distribution: unhandled learner");
}

}  // namespace

std::string mc_learner_name(McLearner learner) {
  switch (learner) {
    case McLearner::T:
      return "t";
    case McLearner::NaiveX:
      return "nvx";
    case McLearner::M:
      return "m";
    case McLearner::Dr:
      return "dr";
    case McLearner::X:
      return "x";
  }
  throw std::logic_error("mc_learner_name: unhandled learner");
}

BetaMonteCarlo mc_beta_distribution(const DgpConfig& cfg, McLearner learner, int replications,
                                    const BasisSpec& basis, int target_k, double clip_floor) {
  cfg.validate();
  if (replications < 30) {
    throw std::invalid_argument("mc_beta_distribution: need at least 30 replications");
  }
  if (target_k < 1 || target_k > cfg.K) {
    throw std::invalid_argument("mc_beta_distribution: target contrast out of range");
  }
  if (basis.dimension < 1 || !basis.evaluate) {
    throw std::invalid_argument("mc_beta_distribution: basis is unset");
  }

  BetaMonteCarlo out;
  out.replications = replications;
  out.n = cfg.n;
  out.K = cfg.K;
  out.target_k = target_k;
  const std::vector<double> rho = marginal_level_probs(cfg);
  out.rho = Eigen::Map<const Eigen::VectorXd>(rho.data(), static_cast<int>(rho.size()));
  out.r_min = r_min_closed_form(cfg);
  out.draws.resize(replications, basis.dimension);

  parallel_for(replications, [&](int r) {
    DgpConfig rep_cfg = cfg;
    rep_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
    const GeneratedData data = generate(rep_cfg);
    const NuisanceSet nuis = exact_nuisances(data.truth, clip_floor);
    out.draws.row(r) = beta_draw(learner, data, nuis, basis, target_k).transpose();
  });

  out.mean = out.draws.colwise().mean();
  const Eigen::MatrixXd centered = out.draws.rowwise() - out.mean.transpose();
  out.covariance = centered.transpose() * centered / static_cast<double>(replications - 1);
  return out;
}

double t_learner_variance_prediction(const Eigen::VectorXd& rho_a, const Eigen::VectorXd& rho_b,
                                     int k) {
  if (rho_a.size() != rho_b.size()) {
    throw std::invalid_argument("t_learner_variance_prediction: designs have different sizes");
  }
  if (k < 1 || k >= rho_a.size()) {
    throw std::invalid_argument("t_learner_variance_prediction: level index out of range");
  }
  for (const Eigen::VectorXd* rho : {&rho_a, &rho_b}) {
    if ((*rho)(0) <= 0.0 || (*rho)(k) <= 0.0) {
      throw std::invalid_argument("t_learner_variance_prediction: zero assignment probability");
    }
  }
  return (1.0 / rho_b(k) + 1.0 / rho_b(0)) / (1.0 / rho_a(k) + 1.0 / rho_a(0));
}

const KSweepCell& KSweepResult::cell(int K, Learner learner) const {
  for (const KSweepCell& c : cells) {
    if (c.K == K && c.learner == learner) return c;
  }
  throw std::out_of_range("KSweepResult::cell: no such (K, learner) pair");
}

KSweepResult k_sweep(DgpModel model, DgpDesign design, const RegressorSpec& base_spec,
                     const std::vector<int>& K_list, int J, const KSweepOptions& options) {
  if (K_list.empty() || J < 1) {
    throw std::invalid_argument("k_sweep: need at least one K and one seed");
  }
  for (std::size_t i = 1; i < K_list.size(); ++i) {
    if (K_list[i] <= K_list[i - 1]) {
      throw std::invalid_argument("k_sweep: K_list must be strictly increasing");
    }
  }

  KSweepResult result;
  result.K_list = K_list;
  result.learners =
      options.learners.empty() ? std::vector<Learner>{Learner::T, Learner::S} : options.learners;
  const int num_K = static_cast<int>(K_list.size());
  const int num_L = static_cast<int>(result.learners.size());
  result.cells.resize(static_cast<std::size_t>(num_K) * num_L);
  for (int i = 0; i < num_K; ++i) {
    for (int l = 0; l < num_L; ++l) {
      KSweepCell& c = result.cells[static_cast<std::size_t>(i) * num_L + l];
      c.K = K_list[i];
      c.learner = result.learners[l];
      c.per_seed_mpehe = Eigen::VectorXd::Zero(J);
    }
  }

  parallel_for(
      num_K * J,
      [&](int cell) {
        const int i = cell / J;
        const int j = cell % J;
        DgpConfig cfg;
        cfg.model = model;
        cfg.design = design;
        cfg.n = options.n;
        cfg.K = K_list[i];
        cfg.sigma = options.sigma;
        cfg.seed = options.base_seed + static_cast<std::uint64_t>(j);
        const GeneratedData data = generate(cfg);

        FitAllOptions fit;
        fit.learners = result.learners;
        fit.base = base_spec;
        fit.clip_floor = options.clip_floor;
        fit.seed = cfg.seed;
        Scenario scenario;
        scenario.gps = Provenance::Exact;
        scenario.outcome = Provenance::Estimated;
        scenario.m = Provenance::Exact;
        const auto estimates = fit_all(data.sample, &data.truth, scenario, fit);

        for (int l = 0; l < num_L; ++l) {
          const PeheReport report =
              pehe(estimates.at(result.learners[l]), data.truth, data.sample.covariates);
          result.cells[static_cast<std::size_t>(i) * num_L + l].per_seed_mpehe(j) = report.mpehe;
        }
      },
      options.workers);

  for (KSweepCell& c : result.cells) {
    c.mean_mpehe = c.per_seed_mpehe.mean();
  }
  return result;
}

}  // namespace mcate
