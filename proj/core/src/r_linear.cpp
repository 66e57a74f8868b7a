#include "mcate/r_linear.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

namespace mcate {

RLossSystem assemble_r_loss(const ObservationalSample& sample, const NuisanceSet& nuis,
                            const BasisSpec& basis) {
  sample.validate();
  if (!nuis.m_hat) {
    throw std::invalid_argument("assemble_r_loss: nuisance set has no outcome-mean model m_hat");
  }
  const int n = sample.n();
  const int K = sample.levels.K();
  const int p = basis.dimension;
  if (K < 1) {
    throw std::invalid_argument("assemble_r_loss: need at least one non-baseline level");
  }

  RLossSystem system;
  system.K = K;
  system.p = p;
  system.basis_matrix.resize(n, p);
  system.treatment_resid.resize(n, K);
  system.outcome_resid.resize(n);
  system.A = Eigen::MatrixXd::Zero(K * p, K * p);
  system.a = Eigen::VectorXd::Zero(K * p);

  Eigen::VectorXd g(K * p);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = sample.covariates.row(i).transpose();
    const Eigen::VectorXd f = basis.evaluate(x);
    if (f.size() != p) {
      throw std::invalid_argument("assemble_r_loss: basis returned wrong dimension");
    }
    system.basis_matrix.row(i) = f.transpose();

    const Eigen::VectorXd probs = nuis.gps(x);
    for (int k = 1; k <= K; ++k) {
      const double indicator = sample.treatment_idx[i] == k ? 1.0 : 0.0;
      system.treatment_resid(i, k - 1) = indicator - probs(k);
    }
    system.outcome_resid(i) = sample.outcome(i) - nuis.m_hat(x);
    if (!std::isfinite(system.outcome_resid(i))) {
      throw std::invalid_argument("assemble_r_loss: non-finite outcome residual");
    }

    for (int k = 0; k < K; ++k) {
      g.segment(k * p, p) = system.treatment_resid(i, k) * f;
    }
    system.A.noalias() += g * g.transpose();
    system.a.noalias() += system.outcome_resid(i) * g;
  }
  system.A /= static_cast<double>(n);
  system.a /= static_cast<double>(n);
  return system;
}

RSolution solve_min_norm(const RLossSystem& system) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system.A);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("solve_min_norm: eigendecomposition failed");
  }
  RSolution sol;
  sol.eigenvalues = eig.eigenvalues();
  const double max_eig = sol.eigenvalues(sol.eigenvalues.size() - 1);
  sol.cutoff = 1e-10 * std::max(max_eig, 0.0);
  sol.beta = Eigen::VectorXd::Zero(system.A.rows());
  sol.numerical_rank = 0;
  for (int j = 0; j < sol.eigenvalues.size(); ++j) {
    const double lambda = sol.eigenvalues(j);
    if (lambda > sol.cutoff && lambda > 0.0) {
      const Eigen::VectorXd v = eig.eigenvectors().col(j);
      sol.beta.noalias() += v * (v.dot(system.a) / lambda);
      ++sol.numerical_rank;
    }
  }
  return sol;
}

double r_loss(const RLossSystem& system, const Eigen::VectorXd& beta) {
  if (beta.size() != system.K * system.p) {
    throw std::invalid_argument("r_loss: coefficient vector has wrong size");
  }
  const int n = static_cast<int>(system.outcome_resid.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double fitted = 0.0;
    for (int k = 0; k < system.K; ++k) {
      fitted += system.treatment_resid(i, k) *
                system.basis_matrix.row(i).dot(beta.segment(k * system.p, system.p));
    }
    const double resid = system.outcome_resid(i) - fitted;
    total += resid * resid;
  }
  return total / static_cast<double>(n);
}

Eigen::VectorXd r_loss_gradient(const RLossSystem& system, const Eigen::VectorXd& beta) {
  if (beta.size() != system.K * system.p) {
    throw std::invalid_argument("r_loss_gradient: coefficient vector has wrong size");
  }
  return 2.0 * (system.A * beta - system.a);
}

CateEstimate r_linear_cate(const RLossSystem& system, const RSolution& solution,
                           const BasisSpec& basis) {
  CateEstimate estimate;
  estimate.tag = Learner::RLin;
  estimate.K = system.K;
  estimate.rlin_rank = solution.numerical_rank;
  const int p = system.p;
  // Copy shared state into the closures so the estimate outlives the system.
  const auto eval = basis.evaluate;
  for (int k = 1; k <= system.K; ++k) {
    const Eigen::VectorXd beta_k = solution.beta.segment((k - 1) * p, p);
    estimate.per_k.push_back(
        [eval, beta_k](const Eigen::VectorXd& x) { return eval(x).dot(beta_k); });
  }
  return estimate;
}

}  // namespace mcate
