#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>

#include "mcate/ground_truth.hpp"

namespace mcate {

// Supervised regression data. Weights may be empty (treated as all ones);
// otherwise they must be finite, nonnegative and not all zero. Fits
// normalize weights by their mean, so constant weight vectors follow the
// exact same arithmetic as unweighted fits.
struct WeightedTrainingSet {
  Eigen::MatrixXd inputs;   // n x d
  Eigen::VectorXd targets;  // n
  Eigen::VectorXd weights;  // n or empty

  int n() const { return static_cast<int>(inputs.rows()); }
  int dim() const { return static_cast<int>(inputs.cols()); }
  void validate() const;
  // Weights divided by their mean; all ones when none were given.
  Eigen::VectorXd normalized_weights() const;
};

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual double predict(const Eigen::VectorXd& x) const = 0;
  virtual int input_dim() const = 0;
  Eigen::VectorXd predict_all(const Eigen::MatrixXd& xs) const;
};

using RegressorPtr = std::shared_ptr<const Regressor>;

struct TreeParams {
  int max_depth = 64;
  int min_samples_leaf = 1;
  int min_samples_split = 2;
};

struct ForestParams {
  int num_trees = 100;
  // Features considered per split; <= 0 means max(1, floor(d/3)).
  int mtry = 0;
  bool bootstrap = true;
  // Rows drawn per tree as a fraction of n when bootstrap is off.
  double sample_fraction = 1.0;
  TreeParams tree;
};

struct BoostParams {
  int rounds = 100;
  double learning_rate = 0.3;
  int max_depth = 6;
  int min_samples_leaf = 1;
};

// Closed family of base learners selectable at run time.
struct RegressorSpec {
  enum class Kind { LinearBasis, Tree, Forest, Boosted };
  Kind kind = Kind::LinearBasis;
  BasisSpec basis;          // LinearBasis
  TreeParams tree;          // Tree
  ForestParams forest;      // Forest
  BoostParams boost;        // Boosted
  std::uint64_t seed = 0;   // randomized ensembles
  // LinearBasis only: on rank-deficient designs fall back to ridge with
  // lambda = 1e-8 trace(X'WX)/p instead of failing.
  bool allow_ridge_fallback = true;

  static RegressorSpec linear_basis(BasisSpec b);
  static RegressorSpec regression_tree(TreeParams p = {});
  static RegressorSpec random_forest(ForestParams p = {}, std::uint64_t seed = 0);
  static RegressorSpec gradient_boosted(BoostParams p = {}, std::uint64_t seed = 0);
};

RegressorPtr fit_regressor(const RegressorSpec& spec, const WeightedTrainingSet& data);

// Weighted least squares on the basis features, solved through the normal
// equations. Exposed concretely so callers can read coefficients.
class LinearBasisModel final : public Regressor {
 public:
  static std::shared_ptr<LinearBasisModel> fit(const BasisSpec& basis,
                                               const WeightedTrainingSet& data,
                                               bool allow_ridge_fallback = true);

  double predict(const Eigen::VectorXd& x) const override;
  int input_dim() const override { return input_dim_; }
  const Eigen::VectorXd& coefficients() const { return beta_; }
  bool used_ridge() const { return used_ridge_; }

 private:
  BasisSpec basis_;
  Eigen::VectorXd beta_;
  int input_dim_ = 0;
  bool used_ridge_ = false;
};

}  // namespace mcate
