#pragma once

#include <cstdint>
#include <vector>

#include "mcate/ground_truth.hpp"
#include "mcate/treatment.hpp"

namespace mcate {

enum class DgpModel { Linear, HazardRate };
enum class DgpDesign { Rct, PreferentialSelection };

// Synthetic data generating process on the level grid t_k = k/K.
//
// Linear:     X ~ U[0, 1] scalar,      mu(t, x) = (1 + t) x.
// HazardRate: X ~ N(0, I_5),           mu(t, x) = t + ||x|| exp(-t ||x||).
//
// Rct assigns levels independently of X (uniformly, or by rct_probs).
// PreferentialSelection mixes an RCT block of weight `rct_fraction` with
// stratum-matched blocks that pair level k with covariates from the k-th
// equal-probability band of the first covariate, so the propensity is
//   r(t_k | x) = w/(K+1) + (1-w) * 1{stratum(x) = k},  w = rct_fraction.
struct DgpConfig {
  DgpModel model = DgpModel::Linear;
  DgpDesign design = DgpDesign::Rct;
  int n = 0;
  int K = 1;
  double sigma = 0.1;
  std::uint64_t seed = 0;
  // Rct only: non-uniform level-sampling probabilities, size K+1. Empty means
  // uniform.
  std::vector<double> rct_probs;
  // PreferentialSelection only: RCT mixing weight w in (0, 1]. Off-stratum
  // propensity mass is w/(K+1).
  double rct_fraction = 0.5;

  void validate() const;
};

struct GeneratedData {
  ObservationalSample sample;
  GroundTruth truth;
};

// Draws a sample and returns it together with the exact closed forms. The
// same seed reproduces the sample bit for bit.
GeneratedData generate(const DgpConfig& cfg);

int covariate_dim(DgpModel model);

// Noiseless response surface mu(t, x).
double mu_true(DgpModel model, double t, const Eigen::VectorXd& x);

// Index of the covariate stratum used by preferential selection. Linear bins
// x_0 on [0, 1]; HazardRate bins the first coordinate by its normal quantile.
int preferential_stratum(DgpModel model, int K, const Eigen::VectorXd& x);

// P(T = t_k | X = x) under the configured design.
double gps_closed_form(const DgpConfig& cfg, int k, const Eigen::VectorXd& x);

// m(x) = sum_k r(t_k, x) mu(t_k, x).
double m_true(const DgpConfig& cfg, const Eigen::VectorXd& x);

// Marginal level probabilities rho(t_k) = E[r(t_k, X)].
std::vector<double> marginal_level_probs(const DgpConfig& cfg);

double r_min_closed_form(const DgpConfig& cfg);

// Exact closed forms bundled for downstream consumers.
GroundTruth make_ground_truth(const DgpConfig& cfg);

}  // namespace mcate
