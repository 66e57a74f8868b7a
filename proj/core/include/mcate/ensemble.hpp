#pragma once

#include <memory>
#include <vector>

#include "mcate/regressor.hpp"
#include "mcate/tree.hpp"

namespace mcate {

// Bagged regression trees with per-split feature subsampling. With one tree,
// bootstrap off, full sample fraction and mtry = d the fit degenerates to a
// single RegressionTree, bit for bit.
class RandomForest final : public Regressor {
 public:
  static std::shared_ptr<RandomForest> fit(const WeightedTrainingSet& data,
                                           const ForestParams& params, std::uint64_t seed);

  double predict(const Eigen::VectorXd& x) const override;
  int input_dim() const override { return input_dim_; }
  const std::vector<std::shared_ptr<RegressionTree>>& trees() const { return trees_; }

 private:
  std::vector<std::shared_ptr<RegressionTree>> trees_;
  int input_dim_ = 0;
};

// Squared-error gradient boosting over depth-limited trees, constant initial
// score, fixed learning rate. Training error never increases between rounds.
class GradientBoosted final : public Regressor {
 public:
  static std::shared_ptr<GradientBoosted> fit(const WeightedTrainingSet& data,
                                              const BoostParams& params, std::uint64_t seed);

  double predict(const Eigen::VectorXd& x) const override;
  int input_dim() const override { return input_dim_; }
  // Weighted training MSE after each round, diagnostics and tests.
  const std::vector<double>& train_mse_history() const { return train_mse_; }

 private:
  double base_score_ = 0.0;
  double learning_rate_ = 0.0;
  std::vector<std::shared_ptr<RegressionTree>> trees_;
  std::vector<double> train_mse_;
  int input_dim_ = 0;
};

// Stream splitter for per-tree seeds (splitmix64 step).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mcate
