#pragma once

// Shared fixtures for the unit tests: tiny hand-built samples and closed-form
// nuisance sets with controllable propensities and per-level outcome means.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "mcate/nuisance.hpp"
#include "mcate/treatment.hpp"

namespace mcate::test {

// One row per treatment level at a shared covariate value x0: row l carries
// T = t_l and Y = mu[l]. Treatment expectations of row-level quantities can
// then be evaluated by direct weighted sums over the rows.
inline ObservationalSample one_row_per_level(const TreatmentLevels& levels, double x0,
                                             const std::vector<double>& mu) {
  ObservationalSample s;
  s.levels = levels;
  const int count = levels.count();
  s.covariates = Eigen::MatrixXd::Constant(count, 1, x0);
  s.outcome.resize(count);
  s.treatment_idx.resize(static_cast<std::size_t>(count));
  for (int l = 0; l < count; ++l) {
    s.treatment_idx[static_cast<std::size_t>(l)] = l;
    s.outcome(l) = mu[static_cast<std::size_t>(l)];
  }
  return s;
}

// Closed-form nuisances with covariate-independent propensities and per-level
// means. The default clip floor is small enough that any propensity vector
// with entries above 1e-6 passes through clipping (up to renormalisation).
inline NuisanceSet fixed_nuisances(const TreatmentLevels& levels, const Eigen::VectorXd& probs,
                                   const std::vector<double>& mu, double clip_floor = 1e-9) {
  NuisanceSet nuis;
  nuis.clip_floor = clip_floor;
  nuis.num_levels = levels.count();
  nuis.gps_raw = [probs](const Eigen::VectorXd&) { return probs; };
  nuis.mu.form = OutcomeModel::Form::Closed;
  nuis.mu.level_values = levels.values;
  const std::vector<double> values = levels.values;
  nuis.mu.closed = [values, mu](double t, const Eigen::VectorXd&) {
    for (std::size_t l = 0; l < values.size(); ++l) {
      if (t == values[l]) return mu[l];
    }
    throw std::invalid_argument("fixed_nuisances: unknown level value");
  };
  return nuis;
}

}  // namespace mcate::test
