#pragma once

#include <Eigen/Dense>

#include "mcate/ground_truth.hpp"
#include "mcate/meta_learners.hpp"

namespace mcate {

// Precision in estimating heterogeneous effects, per contrast and aggregated.
//   pehe_k  = sqrt( (1/n) sum_i (tauhat_k(x_i) - tau_k(x_i))^2 )
//   mpehe   = sqrt( (1/K) sum_k pehe_k^2 )
struct PeheReport {
  Eigen::VectorXd per_k;  // K entries, contrast k = 1..K
  double mpehe = 0.0;
};

// Evaluates an estimate against the true effect surface on the given points
// (one point per row).
PeheReport pehe(const CateEstimate& estimate, const GroundTruth& truth,
                const Eigen::MatrixXd& eval_points);

// Same aggregation applied to an externally computed per-contrast table of
// squared errors is occasionally handy in tests; exposed for reuse.
double aggregate_mpehe(const Eigen::VectorXd& per_k);

}  // namespace mcate
