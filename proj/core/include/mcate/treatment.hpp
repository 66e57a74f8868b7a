#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mcate {

// Ordered grid of treatment values t_0 < t_1 < ... < t_K. Index 0 is the
// baseline level every treatment effect is measured against.
struct TreatmentLevels {
  std::vector<double> values;

  TreatmentLevels() = default;
  explicit TreatmentLevels(std::vector<double> v);

  // Evenly spaced grid t_k = k/K on [0, 1].
  static TreatmentLevels uniform_grid(int K);

  int count() const { return static_cast<int>(values.size()); }
  // Number of contrasts, one per non-baseline level.
  int K() const { return count() - 1; }
  double value(int k) const { return values.at(static_cast<std::size_t>(k)); }
};

// One observational data set: covariate rows, per-row treatment level index
// and outcome. Treat as immutable once validated.
struct ObservationalSample {
  Eigen::MatrixXd covariates;       // n x d
  std::vector<int> treatment_idx;   // n, each in [0, K]
  Eigen::VectorXd outcome;          // n
  TreatmentLevels levels;

  int n() const { return static_cast<int>(covariates.rows()); }
  int dim() const { return static_cast<int>(covariates.cols()); }

  // Throws std::invalid_argument describing the first inconsistency.
  void validate() const;
};

// Row indices grouped by treatment level, one bucket per level index 0..K.
// Empty buckets are allowed here; fitters that need data reject them.
std::vector<std::vector<int>> split_by_treatment(const ObservationalSample& s);

// Floors every entry at `floor_value` and renormalizes the result to sum to
// one. Entries must be finite and nonnegative; the floor must lie in
// (0, 1/size). Already-valid probability vectors pass through unchanged.
Eigen::VectorXd clip_probabilities(const Eigen::VectorXd& p, double floor_value);

}  // namespace mcate
