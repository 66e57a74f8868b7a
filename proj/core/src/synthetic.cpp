#include "mcate/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mcate/rng.hpp"

namespace mcate {

void DgpConfig::validate() const {
  if (n < 1) throw std::invalid_argument("DgpConfig: n must be positive");
  if (K < 1) throw std::invalid_argument("DgpConfig: K must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("DgpConfig: sigma must be >= 0");
  if (!rct_probs.empty()) {
    if (design != DgpDesign::Rct) {
      throw std::invalid_argument("DgpConfig: rct_probs only applies to the Rct design");
    }
    if (static_cast<int>(rct_probs.size()) != K + 1) {
      throw std::invalid_argument("DgpConfig: rct_probs must have K+1 entries");
    }
    double total = 0.0;
    for (double p : rct_probs) {
      if (!(p > 0.0)) throw std::invalid_argument("DgpConfig: rct_probs entries must be positive");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("DgpConfig: rct_probs must sum to one");
    }
  }
  if (design == DgpDesign::PreferentialSelection) {
    if (!(rct_fraction > 0.0) || rct_fraction > 1.0) {
      throw std::invalid_argument("DgpConfig: rct_fraction must lie in (0, 1]");
    }
    if (n < 2 * (K + 1)) {
      throw std::invalid_argument("DgpConfig: preferential selection needs n >= 2(K+1)");
    }
  }
}

int covariate_dim(DgpModel model) {
  return model == DgpModel::Linear ? 1 : 5;
}

double mu_true(DgpModel model, double t, const Eigen::VectorXd& x) {
  if (model == DgpModel::Linear) {
    return (1.0 + t) * x(0);
  }
  const double norm = x.norm();
  return t + norm * std::exp(-t * norm);
}

int preferential_stratum(DgpModel model, int K, const Eigen::VectorXd& x) {
  const double u = model == DgpModel::Linear ? x(0) : normal_cdf(x(0));
  const int j = static_cast<int>(std::floor(u * static_cast<double>(K + 1)));
  return std::clamp(j, 0, K);
}

double gps_closed_form(const DgpConfig& cfg, int k, const Eigen::VectorXd& x) {
  if (k < 0 || k > cfg.K) throw std::invalid_argument("gps_closed_form: level index out of range");
  if (cfg.design == DgpDesign::Rct) {
    if (!cfg.rct_probs.empty()) return cfg.rct_probs[static_cast<std::size_t>(k)];
    return 1.0 / static_cast<double>(cfg.K + 1);
  }
  const double w = cfg.rct_fraction;
  const double off = w / static_cast<double>(cfg.K + 1);
  return preferential_stratum(cfg.model, cfg.K, x) == k ? off + (1.0 - w) : off;
}

double m_true(const DgpConfig& cfg, const Eigen::VectorXd& x) {
  const TreatmentLevels levels = TreatmentLevels::uniform_grid(cfg.K);
  double acc = 0.0;
  for (int k = 0; k <= cfg.K; ++k) {
    acc += gps_closed_form(cfg, k, x) * mu_true(cfg.model, levels.value(k), x);
  }
  return acc;
}

std::vector<double> marginal_level_probs(const DgpConfig& cfg) {
  if (cfg.design == DgpDesign::Rct && !cfg.rct_probs.empty()) return cfg.rct_probs;
  // Uniform either way: RCT by definition; preferential strata carry equal
  // covariate mass, so the level marginals average back to 1/(K+1).
  return std::vector<double>(static_cast<std::size_t>(cfg.K) + 1,
                             1.0 / static_cast<double>(cfg.K + 1));
}

double r_min_closed_form(const DgpConfig& cfg) {
  if (cfg.design == DgpDesign::Rct) {
    if (!cfg.rct_probs.empty()) {
      return *std::min_element(cfg.rct_probs.begin(), cfg.rct_probs.end());
    }
    return 1.0 / static_cast<double>(cfg.K + 1);
  }
  return cfg.rct_fraction / static_cast<double>(cfg.K + 1);
}

GroundTruth make_ground_truth(const DgpConfig& cfg) {
  GroundTruth truth;
  truth.levels = TreatmentLevels::uniform_grid(cfg.K);
  truth.sigma = cfg.sigma;
  truth.r_min = r_min_closed_form(cfg);
  const DgpModel model = cfg.model;
  truth.response = [model](double t, const Eigen::VectorXd& x) {
    return mu_true(model, t, x);
  };
  const DgpConfig frozen = cfg;
  truth.gps = [frozen](int k, const Eigen::VectorXd& x) {
    return gps_closed_form(frozen, k, x);
  };
  truth.m = [frozen](const Eigen::VectorXd& x) { return m_true(frozen, x); };
  return truth;
}

namespace {

Eigen::VectorXd draw_covariates_marginal(const DgpConfig& cfg, Rng& rng) {
  Eigen::VectorXd x(covariate_dim(cfg.model));
  if (cfg.model == DgpModel::Linear) {
    x(0) = rng.uniform01();
    return x;
  }
  for (int j = 0; j < 5; ++j) x(j) = rng.normal();
  return x;
}

Eigen::VectorXd draw_covariates_stratum(const DgpConfig& cfg, int k, Rng& rng) {
  Eigen::VectorXd x(covariate_dim(cfg.model));
  const double lo = static_cast<double>(k) / static_cast<double>(cfg.K + 1);
  const double hi = static_cast<double>(k + 1) / static_cast<double>(cfg.K + 1);
  if (cfg.model == DgpModel::Linear) {
    x(0) = lo + (hi - lo) * rng.uniform01();
    return x;
  }
  x(0) = rng.truncated_normal_quantile_band(lo, hi);
  for (int j = 1; j < 5; ++j) x(j) = rng.normal();
  return x;
}

}  // namespace

GeneratedData generate(const DgpConfig& cfg) {
  cfg.validate();
  const int d = covariate_dim(cfg.model);
  const TreatmentLevels levels = TreatmentLevels::uniform_grid(cfg.K);

  ObservationalSample sample;
  sample.levels = levels;
  sample.covariates.resize(cfg.n, d);
  sample.outcome.resize(cfg.n);
  sample.treatment_idx.resize(static_cast<std::size_t>(cfg.n));

  int n_rct = cfg.n;
  int matched_per = 0;
  if (cfg.design == DgpDesign::PreferentialSelection) {
    const int rct_target = static_cast<int>(std::llround(cfg.rct_fraction * cfg.n));
    // Integer remainders fold into the RCT block so counts always add up.
    matched_per = (cfg.n - rct_target) / (cfg.K + 1);
    n_rct = cfg.n - matched_per * (cfg.K + 1);
  }

  Rng rng(cfg.seed);
  int row = 0;
  for (; row < n_rct; ++row) {
    const int k = cfg.rct_probs.empty() ? rng.uniform_int(cfg.K + 1)
                                        : rng.categorical(cfg.rct_probs);
    sample.treatment_idx[static_cast<std::size_t>(row)] = k;
    const Eigen::VectorXd x = draw_covariates_marginal(cfg, rng);
    sample.covariates.row(row) = x.transpose();
    sample.outcome(row) = mu_true(cfg.model, levels.value(k), x) + cfg.sigma * rng.normal();
  }
  for (int k = 0; k <= cfg.K && cfg.design == DgpDesign::PreferentialSelection; ++k) {
    for (int m = 0; m < matched_per; ++m, ++row) {
      sample.treatment_idx[static_cast<std::size_t>(row)] = k;
      const Eigen::VectorXd x = draw_covariates_stratum(cfg, k, rng);
      sample.covariates.row(row) = x.transpose();
      sample.outcome(row) = mu_true(cfg.model, levels.value(k), x) + cfg.sigma * rng.normal();
    }
  }
  sample.validate();
  return GeneratedData{std::move(sample), make_ground_truth(cfg)};
}

}  // namespace mcate
