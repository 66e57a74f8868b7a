#pragma once

#include <memory>
#include <vector>

#include "mcate/regressor.hpp"
#include "mcate/rng.hpp"

namespace mcate {

// CART-style regression tree, exact greedy search over squared-error splits.
// Ties between equally good splits resolve to the lowest feature index and
// then the lowest threshold, so fits are bit-reproducible.
class RegressionTree final : public Regressor {
 public:
  struct Node {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0; // goes left when x(feature) <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;     // leaf prediction
  };

  static std::shared_ptr<RegressionTree> fit(const WeightedTrainingSet& data,
                                             const TreeParams& params);

  // Ensemble entry point: fit on the given rows (duplicates allowed, e.g.
  // bootstrap draws). When 0 < mtry < d each split considers a random subset
  // of mtry features drawn from `rng`.
  static std::shared_ptr<RegressionTree> fit_rows(const Eigen::MatrixXd& inputs,
                                                  const Eigen::VectorXd& targets,
                                                  const Eigen::VectorXd& weights,
                                                  std::vector<int> rows,
                                                  const TreeParams& params, int mtry,
                                                  Rng* rng);

  double predict(const Eigen::VectorXd& x) const override;
  int input_dim() const override { return input_dim_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
  int input_dim_ = 0;
};

}  // namespace mcate
