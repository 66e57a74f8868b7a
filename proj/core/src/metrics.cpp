#include "mcate/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace mcate {

PeheReport pehe(const CateEstimate& estimate, const GroundTruth& truth,
                const Eigen::MatrixXd& eval_points) {
  const int K = estimate.K;
  if (K < 1) {
    throw std::invalid_argument("pehe: estimate has no contrasts");
  }
  if (truth.levels.K() != K) {
    throw std::invalid_argument("pehe: estimate and truth disagree on the number of contrasts");
  }
  const int n = static_cast<int>(eval_points.rows());
  if (n == 0) {
    throw std::invalid_argument("pehe: no evaluation points");
  }

  PeheReport report;
  report.per_k = Eigen::VectorXd::Zero(K);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = eval_points.row(i).transpose();
    for (int k = 1; k <= K; ++k) {
      const double diff = estimate.predict(k, x) - truth.tau(k, x);
      report.per_k(k - 1) += diff * diff;
    }
  }
  report.per_k /= static_cast<double>(n);
  report.per_k = report.per_k.cwiseSqrt();
  report.mpehe = aggregate_mpehe(report.per_k);
  return report;
}

double aggregate_mpehe(const Eigen::VectorXd& per_k) {
  if (per_k.size() == 0) {
    throw std::invalid_argument("aggregate_mpehe: empty per-contrast vector");
  }
  return std::sqrt(per_k.squaredNorm() / static_cast<double>(per_k.size()));
}

}  // namespace mcate
