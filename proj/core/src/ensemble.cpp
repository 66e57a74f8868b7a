#include "mcate/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcate {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + stream * 0x9e3779b97f4a7c15ull + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::shared_ptr<RandomForest> RandomForest::fit(const WeightedTrainingSet& data,
                                                const ForestParams& params,
                                                std::uint64_t seed) {
  data.validate();
  if (params.num_trees < 1) throw std::invalid_argument("RandomForest: num_trees must be >= 1");
  if (!(params.sample_fraction > 0.0) || params.sample_fraction > 1.0) {
    throw std::invalid_argument("RandomForest: sample_fraction must lie in (0, 1]");
  }
  const int n = data.n();
  const int d = data.dim();
  const int mtry = params.mtry > 0 ? std::min(params.mtry, d) : std::max(1, d / 3);
  const Eigen::VectorXd w = data.normalized_weights();

  auto forest = std::make_shared<RandomForest>();
  forest->input_dim_ = d;
  forest->trees_.reserve(static_cast<std::size_t>(params.num_trees));
  std::vector<int> base(static_cast<std::size_t>(n));
  std::iota(base.begin(), base.end(), 0);
  for (int t = 0; t < params.num_trees; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<int> rows;
    if (params.bootstrap) {
      rows.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = rng.uniform_int(n);
    } else if (params.sample_fraction < 1.0) {
      const int take = std::max(1, static_cast<int>(params.sample_fraction * n));
      rows = base;
      for (int i = 0; i < take; ++i) {
        const int j = i + rng.uniform_int(n - i);
        std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
      }
      rows.resize(static_cast<std::size_t>(take));
    } else {
      rows = base;
    }
    forest->trees_.push_back(RegressionTree::fit_rows(data.inputs, data.targets, w,
                                                      std::move(rows), params.tree, mtry,
                                                      mtry >= d ? nullptr : &rng));
  }
  return forest;
}

double RandomForest::predict(const Eigen::VectorXd& x) const {
  // Anchored average: exact when every tree predicts the same constant.
  const double first = trees_.front()->predict(x);
  double acc = 0.0;
  for (const auto& tree : trees_) acc += tree->predict(x) - first;
  return first + acc / static_cast<double>(trees_.size());
}

std::shared_ptr<GradientBoosted> GradientBoosted::fit(const WeightedTrainingSet& data,
                                                      const BoostParams& params,
                                                      std::uint64_t /*seed*/) {
  data.validate();
  if (params.rounds < 0) throw std::invalid_argument("GradientBoosted: negative rounds");
  if (!(params.learning_rate > 0.0) || params.learning_rate > 2.0) {
    // Squared-error boosting only contracts the training loss up to rate 2.
    throw std::invalid_argument("GradientBoosted: learning_rate must lie in (0, 2]");
  }
  const int n = data.n();
  const Eigen::VectorXd w = data.normalized_weights();
  const double wsum = w.sum();

  auto model = std::make_shared<GradientBoosted>();
  model->input_dim_ = data.dim();
  model->learning_rate_ = params.learning_rate;
  {
    const double anchor = data.targets(0);
    const Eigen::VectorXd shifted = data.targets.array() - anchor;
    model->base_score_ = anchor + w.dot(shifted) / wsum;
  }

  TreeParams tree_params;
  tree_params.max_depth = params.max_depth;
  tree_params.min_samples_leaf = params.min_samples_leaf;

  Eigen::VectorXd residual = data.targets.array() - model->base_score_;
  std::vector<int> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  model->train_mse_.reserve(static_cast<std::size_t>(params.rounds) + 1);
  model->train_mse_.push_back(w.dot(residual.cwiseProduct(residual)) / wsum);
  for (int round = 0; round < params.rounds; ++round) {
    auto tree = RegressionTree::fit_rows(data.inputs, residual, w, rows, tree_params, 0, nullptr);
    for (int i = 0; i < n; ++i) {
      residual(i) -= params.learning_rate * tree->predict(data.inputs.row(i));
    }
    model->trees_.push_back(std::move(tree));
    model->train_mse_.push_back(w.dot(residual.cwiseProduct(residual)) / wsum);
  }
  return model;
}

double GradientBoosted::predict(const Eigen::VectorXd& x) const {
  double score = base_score_;
  for (const auto& tree : trees_) score += learning_rate_ * tree->predict(x);
  return score;
}

}  // namespace mcate
