#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "mcate/ground_truth.hpp"
#include "mcate/regressor.hpp"

namespace mcate {

// Conditional class-probability model, used for the generalized propensity
// score. Predictions are full probability vectors over the classes.
class ProbabilityEstimator {
 public:
  virtual ~ProbabilityEstimator() = default;
  virtual Eigen::VectorXd predict(const Eigen::VectorXd& x) const = 0;
  virtual int num_classes() const = 0;
  // Set when the training labels contained a single class and the model
  // collapsed to a point mass.
  virtual bool degenerate() const { return false; }
};

using ProbabilityPtr = std::shared_ptr<const ProbabilityEstimator>;

struct ProbabilitySpec {
  enum class Kind { MultinomialLogistic, GradientBoostedSoftmax, EmpiricalStratum };
  Kind kind = Kind::GradientBoostedSoftmax;

  BasisSpec basis;            // MultinomialLogistic feature map
  int max_iterations = 500;   // full-batch gradient descent budget
  double grad_tolerance = 1e-8;

  BoostParams boost;          // GradientBoostedSoftmax

  // EmpiricalStratum: maps x to a bin id in [0, bin_count). Null means one
  // global bin.
  std::function<int(const Eigen::VectorXd&)> binning;
  int bin_count = 1;

  static ProbabilitySpec multinomial_logistic(BasisSpec basis);
  static ProbabilitySpec boosted_softmax(BoostParams p = {});
  static ProbabilitySpec empirical_stratum(std::function<int(const Eigen::VectorXd&)> binning,
                                           int bin_count);
};

// Labels must lie in [0, num_classes). MultinomialLogistic additionally
// requires every class to appear, except that single-class data returns a
// degenerate point-mass model instead of failing.
ProbabilityPtr fit_probability(const ProbabilitySpec& spec, const Eigen::MatrixXd& inputs,
                               const std::vector<int>& labels, int num_classes);

}  // namespace mcate
