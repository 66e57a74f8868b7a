#pragma once

#include <Eigen/Dense>
#include <functional>

#include "mcate/treatment.hpp"

namespace mcate {

// Fixed feature map used by the linear base learner and the partially linear
// effect model. First feature is always the constant 1.
struct BasisSpec {
  int dimension = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> evaluate;

  static BasisSpec intercept();
  // {1, x_0, ..., x_{d-1}}.
  static BasisSpec linear(int input_dim);
  // {1, ||x||}, the default for multivariate covariates.
  static BasisSpec intercept_norm();
};

// Closed-form description of a data generating process: response surface,
// generalized propensity score, conditional mean outcome and the implied
// treatment effects. Everything is a deterministic function of x.
struct GroundTruth {
  TreatmentLevels levels;
  double sigma = 0.0;   // outcome noise scale
  double r_min = 0.0;   // propensity lower bound over levels and x

  // Noiseless response surface mu(t, x) at treatment value t.
  std::function<double(double, const Eigen::VectorXd&)> response;
  // P(T = t_k | X = x), addressed by level index.
  std::function<double(int, const Eigen::VectorXd&)> gps;
  // m(x) = E[Y | X = x] marginalized over treatment assignment.
  std::function<double(const Eigen::VectorXd&)> m;

  // tau_k(x) = mu(t_k, x) - mu(t_0, x) for k in 1..K.
  double tau(int k, const Eigen::VectorXd& x) const {
    return response(levels.value(k), x) - response(levels.value(0), x);
  }
};

// Probes the closed forms at the given points: propensities sum to one and
// respect r_min, and tau agrees with the response differences. Throws on the
// first violation beyond `tol`.
void check_ground_truth(const GroundTruth& truth, const Eigen::MatrixXd& points,
                        double tol = 1e-12);

}  // namespace mcate
