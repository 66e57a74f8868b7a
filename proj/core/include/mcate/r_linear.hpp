#pragma once

#include <Eigen/Dense>

#include "mcate/meta_learners.hpp"
#include "mcate/nuisance.hpp"
#include "mcate/treatment.hpp"

namespace mcate {

// Quadratic form of the residual-on-residual loss
//   L(beta) = (1/n) || Ybar - sum_k Tbar_k .* (H beta_k) ||^2
// where Ybar_i = Y_i - m(X_i), Tbar_{i,k} = 1{T_i = t_k} - r(t_k, X_i) for
// the non-baseline levels k = 1..K, and H is the n x p basis matrix. The
// normal operator A and moment vector a are accumulated per row from the
// stacked gradient vectors g_i = (Tbar_{i,1} f(x_i), ..., Tbar_{i,K} f(x_i)),
//   A = (1/n) sum_i g_i g_i',   a = (1/n) sum_i Ybar_i g_i,
// so A is symmetric positive semidefinite by construction. Block (j, j) of A
// is (1/n) H' D^2_{Tbar_j} H and block (i, j) is (1/n) H' D_{Tbar_i}
// D_{Tbar_j} H, with a_j = (1/n) H' D_{Tbar_j} Ybar.
struct RLossSystem {
  Eigen::MatrixXd A;                // (K p) x (K p)
  Eigen::VectorXd a;                // K p
  Eigen::MatrixXd basis_matrix;     // n x p, rows f(x_i)
  Eigen::MatrixXd treatment_resid;  // n x K
  Eigen::VectorXd outcome_resid;    // n
  int K = 0;
  int p = 0;
};

// Builds the system from a sample and nuisances. Requires m_hat; propensities
// are clipped at the configured floor first.
RLossSystem assemble_r_loss(const ObservationalSample& sample, const NuisanceSet& nuis,
                            const BasisSpec& basis);

struct RSolution {
  Eigen::VectorXd beta;         // stacked (beta_1, ..., beta_K), minimum norm
  Eigen::VectorXd eigenvalues;  // spectrum of A, ascending
  double cutoff = 0.0;          // eigenvalue threshold used
  int numerical_rank = 0;
};

// Minimum-norm stationary point beta = A^+ a through the eigendecomposition
// of the symmetric A, discarding eigenvalues at or below
// 1e-10 * max eigenvalue.
RSolution solve_min_norm(const RLossSystem& system);

// Loss evaluated directly from the cached residual inputs, not through A.
double r_loss(const RLossSystem& system, const Eigen::VectorXd& beta);

// Gradient 2 (A beta - a).
Eigen::VectorXd r_loss_gradient(const RLossSystem& system, const Eigen::VectorXd& beta);

// Per-contrast linear effect predictors tau_k(x) = f(x)' beta_k.
CateEstimate r_linear_cate(const RLossSystem& system, const RSolution& solution,
                           const BasisSpec& basis);

}  // namespace mcate
