#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mcate/meta_learners.hpp"
#include "mcate/regressor.hpp"
#include "mcate/synthetic.hpp"

namespace mcate {

// Learners whose contrast-k fit reduces to a coefficient vector on a shared
// linear basis, so repeated fits have well-defined empirical moments.
enum class McLearner { T, NaiveX, M, Dr, X };

std::string mc_learner_name(McLearner learner);

struct BetaMonteCarlo {
  int replications = 0;
  int n = 0;
  int K = 0;
  int target_k = 1;          // contrast whose coefficients are tracked
  Eigen::VectorXd rho;       // marginal level assignment probabilities
  double r_min = 0.0;        // propensity floor of the generating design
  Eigen::MatrixXd draws;     // replications x p, one coefficient vector per row
  Eigen::VectorXd mean;      // column means of draws
  Eigen::MatrixXd covariance;  // unbiased empirical covariance (divisor R-1)
};

// Repeatedly generates the configured DGP (replication r reseeds with
// cfg.seed + r), fits the learner for contrast target_k on the shared basis
// and records the coefficient vector:
//   T       per-level least squares, beta = coef(target_k) - coef(0)
//   NaiveX  two imputed-difference regressions reusing the T-learner level
//           fits, blended with the average propensity ratio (the shared-basis
//           identity makes the blend weight immaterial)
//   M/Dr/X  pseudo-outcome for contrast target_k under exact nuisances,
//           regressed on the basis
// Throws when replications < 30 (moments would be meaningless) or target_k
// is out of range.
BetaMonteCarlo mc_beta_distribution(const DgpConfig& cfg, McLearner learner, int replications,
                                    const BasisSpec& basis, int target_k = 1,
                                    double clip_floor = 1e-3);

// Asymptotic per-level variance ratio of the T-learner contrast k between two
// level designs: (1/rho_b(k) + 1/rho_b(0)) / (1/rho_a(k) + 1/rho_a(0)).
// Throws on mismatched sizes, invalid k or nonpositive probabilities.
double t_learner_variance_prediction(const Eigen::VectorXd& rho_a, const Eigen::VectorXd& rho_b,
                                     int k);

struct KSweepCell {
  int K = 0;
  Learner learner = Learner::T;
  Eigen::VectorXd per_seed_mpehe;  // one entry per seed
  double mean_mpehe = 0.0;
};

struct KSweepResult {
  std::vector<int> K_list;
  std::vector<Learner> learners;
  std::vector<KSweepCell> cells;  // K-major, learner-minor

  const KSweepCell& cell(int K, Learner learner) const;
};

struct KSweepOptions {
  int n = 2000;
  double sigma = 0.1;
  std::uint64_t base_seed = 1;              // seed j uses base_seed + j
  std::vector<Learner> learners;            // empty defaults to {T, S}
  double clip_floor = 1e-3;
  int workers = 0;                          // 0 picks worker_count()
};

// Mean mPEHE per (K, learner) over J seeded datasets, with outcome models
// estimated from data and propensities/marginal means taken exact. K_list
// must be strictly increasing; J >= 1.
KSweepResult k_sweep(DgpModel model, DgpDesign design, const RegressorSpec& base_spec,
                     const std::vector<int>& K_list, int J, const KSweepOptions& options = {});

}  // namespace mcate
