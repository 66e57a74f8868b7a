#include "mcate/ground_truth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcate {

BasisSpec BasisSpec::intercept() {
  BasisSpec b;
  b.dimension = 1;
  b.evaluate = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Ones(1);
  };
  return b;
}

BasisSpec BasisSpec::linear(int input_dim) {
  if (input_dim < 1) throw std::invalid_argument("BasisSpec::linear: input_dim must be >= 1");
  BasisSpec b;
  b.dimension = input_dim + 1;
  b.evaluate = [input_dim](const Eigen::VectorXd& x) {
    if (x.size() != input_dim) {
      throw std::invalid_argument("BasisSpec::linear: input dimension mismatch");
    }
    Eigen::VectorXd f(input_dim + 1);
    f(0) = 1.0;
    f.tail(input_dim) = x;
    return f;
  };
  return b;
}

BasisSpec BasisSpec::intercept_norm() {
  BasisSpec b;
  b.dimension = 2;
  b.evaluate = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd f(2);
    f(0) = 1.0;
    f(1) = x.norm();
    return f;
  };
  return b;
}

void check_ground_truth(const GroundTruth& truth, const Eigen::MatrixXd& points,
                        double tol) {
  if (!truth.response || !truth.gps || !truth.m) {
    throw std::invalid_argument("check_ground_truth: missing closed form");
  }
  const int K = truth.levels.K();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Eigen::VectorXd x = points.row(i);
    double total = 0.0;
    for (int k = 0; k <= K; ++k) {
      const double r = truth.gps(k, x);
      if (r < truth.r_min - tol) {
        throw std::runtime_error("check_ground_truth: gps below r_min at point " +
                                 std::to_string(i));
      }
      total += r;
    }
    if (std::fabs(total - 1.0) > tol) {
      throw std::runtime_error("check_ground_truth: gps does not sum to one at point " +
                               std::to_string(i));
    }
    for (int k = 1; k <= K; ++k) {
      const double direct = truth.tau(k, x);
      const double diff = truth.response(truth.levels.value(k), x) -
                          truth.response(truth.levels.value(0), x);
      if (std::fabs(direct - diff) > tol) {
        throw std::runtime_error("check_ground_truth: tau mismatch at point " +
                                 std::to_string(i));
      }
    }
  }
}

}  // namespace mcate
