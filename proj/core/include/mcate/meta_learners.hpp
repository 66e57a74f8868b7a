#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mcate/nuisance.hpp"
#include "mcate/treatment.hpp"

namespace mcate {

enum class Learner { T, RegT, S, NaiveX, M, Dr, X, RLin };

std::string learner_name(Learner learner);
Learner learner_from_name(const std::string& name);
const std::vector<Learner>& all_learners();

// Fitted treatment-effect estimates, one predictor per contrast k = 1..K
// against the baseline level.
struct CateEstimate {
  Learner tag = Learner::T;
  int K = 0;
  // True when the estimate consumed a deliberately misspecified nuisance.
  bool nuisance_affected = false;
  // Numerical rank of the normal operator, R-linear fits only, else -1.
  int rlin_rank = -1;
  std::vector<std::function<double(const Eigen::VectorXd&)>> per_k;

  double predict(int k, const Eigen::VectorXd& x) const;
};

// Pseudo-outcomes for contrast k, one value per sample row. Propensities are
// clipped before any division.
//
//   M:  1{T=t_k} Y / r(t_k, X) - 1{T=t_0} Y / r(t_0, X)
//   DR: 1{T=t_k} (Y - mu_T(X)) / r(t_k, X) + mu_k(X)
//       - 1{T=t_0} (Y - mu_T(X)) / r(t_0, X) - mu_0(X)
//   X:  1{T=t_k} (Y - mu_0(X)) + sum_{l != k} 1{T=t_l} (mu_k(X) - Y)
//       + sum_{l != k} 1{T=t_l} (mu_l(X) - mu_0(X))
Eigen::VectorXd pseudo_outcome_m(const ObservationalSample& sample, const NuisanceSet& nuis,
                                 int k);
Eigen::VectorXd pseudo_outcome_dr(const ObservationalSample& sample, const NuisanceSet& nuis,
                                  int k);
Eigen::VectorXd pseudo_outcome_x(const ObservationalSample& sample, const NuisanceSet& nuis,
                                 int k);

// Regresses a pseudo-outcome vector on the covariates over the full sample.
RegressorPtr fit_pseudo_learner(const ObservationalSample& sample,
                                const Eigen::VectorXd& pseudo, const RegressorSpec& base,
                                std::uint64_t seed = 0);

// Plug-in difference mu_k - mu_0 of the outcome model. Serves the T, RegT and
// S learners depending on how the nuisances were built.
CateEstimate plug_in_learner(const NuisanceSet& nuis, Learner tag);

// One pseudo-outcome regression per contrast. `kind` selects M, Dr or X.
CateEstimate pseudo_outcome_learner(Learner kind, const ObservationalSample& sample,
                                    const NuisanceSet& nuis, const RegressorSpec& base,
                                    std::uint64_t seed = 0);

// Regression-adjusted learner: per contrast k, regress Y - mu_0(X) on the
// level-k stratum and mu_k(X) - Y on the baseline stratum, then blend the two
// fits with weights r(t_k, x) / (r(t_k, x) + r(t_0, x)) from the raw
// propensities. Requires per-level or closed-form outcome nuisances.
CateEstimate naive_x_learner(const ObservationalSample& sample, const NuisanceSet& nuis,
                             const RegressorSpec& base, std::uint64_t seed = 0);

// Which nuisance components each scenario supplies exactly, by estimation, or
// deliberately misspecified (uniform propensity, intercept-only outcome fit).
struct Scenario {
  Provenance gps = Provenance::Exact;
  Provenance outcome = Provenance::Exact;
  Provenance m = Provenance::Exact;
};

struct FitAllOptions {
  std::vector<Learner> learners;  // empty runs nothing
  RegressorSpec base;
  ProbabilitySpec gps_spec;
  // Outcome-model strategy consumed by the pseudo-outcome learners.
  NuisanceStrategy mu_strategy = NuisanceStrategy::PerLevel;
  // Effect basis for the R-linear learner; defaults by covariate dimension
  // when left unconfigured.
  BasisSpec rlin_basis;
  double clip_floor = 1e-3;
  std::uint64_t seed = 0;
};

// Fits every requested learner under one scenario. `truth` supplies closed
// forms and may be null when no component is exact. Estimates consuming a
// misspecified component come back flagged.
std::map<Learner, CateEstimate> fit_all(const ObservationalSample& sample,
                                        const GroundTruth* truth, const Scenario& scenario,
                                        const FitAllOptions& options);

}  // namespace mcate
