#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "mcate/ground_truth.hpp"
#include "mcate/probability.hpp"
#include "mcate/regressor.hpp"
#include "mcate/treatment.hpp"

namespace mcate {

enum class Provenance { Exact, Estimated, Misspecified };

// How the conditional outcome means are modeled: one regressor per level,
// one joint regressor over (t, x), or the same per-level fits reweighted by
// inverse propensity.
enum class NuisanceStrategy { PerLevel, Joint, WeightedPerLevel };

// Conditional mean outcome mu(t_k, x), uniform interface over per-level fits,
// a joint (t, x) fit, or a closed form.
struct OutcomeModel {
  enum class Form { PerLevel, Joint, Closed };
  Form form = Form::Closed;
  std::vector<RegressorPtr> per_level;                      // Form::PerLevel
  RegressorPtr joint;                                       // Form::Joint, input [t; x]
  std::function<double(double, const Eigen::VectorXd&)> closed;
  std::vector<double> level_values;

  double predict(int k, const Eigen::VectorXd& x) const;
  int num_levels() const { return static_cast<int>(level_values.size()); }
};

// Fitted or exact nuisances consumed by every meta-learner. Propensities are
// always pushed through clip_probabilities before any division.
struct NuisanceSet {
  Provenance gps_provenance = Provenance::Exact;
  Provenance outcome_provenance = Provenance::Exact;
  Provenance m_provenance = Provenance::Exact;
  double clip_floor = 1e-3;
  int num_levels = 0;

  // Raw per-level probabilities, possibly containing zeros.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gps_raw;
  OutcomeModel mu;
  std::function<double(const Eigen::VectorXd&)> m_hat;  // may be empty

  Eigen::VectorXd gps(const Eigen::VectorXd& x) const {
    return clip_probabilities(gps_raw(x), clip_floor);
  }
};

struct NuisanceOptions {
  NuisanceStrategy strategy = NuisanceStrategy::PerLevel;
  ProbabilitySpec gps_spec;
  RegressorSpec base_spec;
  double clip_floor = 1e-3;
  // Callers that only consume the outcome component can skip the propensity
  // fit; gps_raw is then left unset.
  bool fit_gps = true;
  bool fit_m = false;
  std::uint64_t seed = 0;
};

// Fits propensity and outcome models on the sample. Per-level strategies
// require every stratum to be non-empty and report the offending level
// otherwise. WeightedPerLevel weights stratum rows by the inverse fitted
// propensity of their own level.
NuisanceSet estimate_nuisances(const ObservationalSample& sample, const NuisanceOptions& options);

// Wraps the closed forms of a known data generating process.
NuisanceSet exact_nuisances(const GroundTruth& truth, double clip_floor = 1e-3);

// Deliberate misspecification protocol: the propensity becomes the uniform
// distribution over levels and outcome fits collapse to intercept-only means.
std::function<Eigen::VectorXd(const Eigen::VectorXd&)> misspecified_gps(int num_levels);
OutcomeModel misspecified_outcome(const ObservationalSample& sample, NuisanceStrategy strategy);
std::function<double(const Eigen::VectorXd&)> misspecified_m(const ObservationalSample& sample);

// Joint-input helpers shared by S-strategy fits: input vector [t; x] and the
// basis augmentation [f(x), t f(x)] that keeps linear bases expressive over
// the treatment.
Eigen::VectorXd joint_input(double t, const Eigen::VectorXd& x);
BasisSpec joint_basis(const BasisSpec& covariate_basis);

}  // namespace mcate
