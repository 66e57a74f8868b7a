#include "mcate/nuisance.hpp"

#include <stdexcept>
#include <string>

#include "mcate/ensemble.hpp"

namespace mcate {

double OutcomeModel::predict(int k, const Eigen::VectorXd& x) const {
  if (k < 0 || k >= num_levels()) {
    throw std::invalid_argument("OutcomeModel: level index out of range");
  }
  switch (form) {
    case Form::PerLevel:
      return per_level[static_cast<std::size_t>(k)]->predict(x);
    case Form::Joint:
      return joint->predict(joint_input(level_values[static_cast<std::size_t>(k)], x));
    case Form::Closed:
      return closed(level_values[static_cast<std::size_t>(k)], x);
  }
  throw std::logic_error("OutcomeModel: unknown form");
}

Eigen::VectorXd joint_input(double t, const Eigen::VectorXd& x) {
  Eigen::VectorXd z(x.size() + 1);
  z(0) = t;
  z.tail(x.size()) = x;
  return z;
}

BasisSpec joint_basis(const BasisSpec& covariate_basis) {
  if (!covariate_basis.evaluate || covariate_basis.dimension < 1) {
    throw std::invalid_argument("joint_basis: basis not configured");
  }
  BasisSpec b;
  b.dimension = 2 * covariate_basis.dimension;
  const BasisSpec inner = covariate_basis;
  b.evaluate = [inner](const Eigen::VectorXd& z) {
    const Eigen::VectorXd f = inner.evaluate(z.tail(z.size() - 1));
    Eigen::VectorXd g(2 * f.size());
    g.head(f.size()) = f;
    g.tail(f.size()) = z(0) * f;
    return g;
  };
  return b;
}

namespace {

RegressorSpec with_seed(RegressorSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  return spec;
}

// Joint fits consume [t; x]; linear bases get the treatment-augmented basis
// so the feature map stays explicit instead of treating t as a raw column.
RegressorSpec joint_spec(const RegressorSpec& base) {
  if (base.kind != RegressorSpec::Kind::LinearBasis) return base;
  RegressorSpec spec = base;
  spec.basis = joint_basis(base.basis);
  return spec;
}

std::vector<RegressorPtr> fit_per_level(const ObservationalSample& sample,
                                        const RegressorSpec& base,
                                        const std::vector<std::vector<int>>& strata,
                                        const NuisanceSet* gps_for_weights,
                                        std::uint64_t seed) {
  const int levels = sample.levels.count();
  std::vector<RegressorPtr> fits(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    const auto& rows = strata[static_cast<std::size_t>(k)];
    if (rows.empty()) {
      throw std::invalid_argument("estimate_nuisances: stratum for level " + std::to_string(k) +
                                  " is empty");
    }
    WeightedTrainingSet data;
    data.inputs.resize(static_cast<Eigen::Index>(rows.size()), sample.dim());
    data.targets.resize(static_cast<Eigen::Index>(rows.size()));
    if (gps_for_weights != nullptr) data.weights.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int r = rows[i];
      data.inputs.row(static_cast<Eigen::Index>(i)) = sample.covariates.row(r);
      data.targets(static_cast<Eigen::Index>(i)) = sample.outcome(r);
      if (gps_for_weights != nullptr) {
        const Eigen::VectorXd probs = gps_for_weights->gps(sample.covariates.row(r));
        data.weights(static_cast<Eigen::Index>(i)) = 1.0 / probs(k);
      }
    }
    fits[static_cast<std::size_t>(k)] =
        fit_regressor(with_seed(base, mix_seed(seed, static_cast<std::uint64_t>(k))), data);
  }
  return fits;
}

RegressorPtr fit_joint(const ObservationalSample& sample, const RegressorSpec& base,
                       std::uint64_t seed) {
  WeightedTrainingSet data;
  data.inputs.resize(sample.n(), sample.dim() + 1);
  data.targets = sample.outcome;
  for (int i = 0; i < sample.n(); ++i) {
    data.inputs(i, 0) = sample.levels.value(sample.treatment_idx[static_cast<std::size_t>(i)]);
    data.inputs.row(i).tail(sample.dim()) = sample.covariates.row(i);
  }
  return fit_regressor(with_seed(joint_spec(base), mix_seed(seed, 0x5eed)), data);
}

}  // namespace

NuisanceSet estimate_nuisances(const ObservationalSample& sample,
                               const NuisanceOptions& options) {
  sample.validate();
  const int levels = sample.levels.count();
  NuisanceSet nuis;
  nuis.gps_provenance = Provenance::Estimated;
  nuis.outcome_provenance = Provenance::Estimated;
  nuis.clip_floor = options.clip_floor;
  nuis.num_levels = levels;

  // WeightedPerLevel needs the fitted propensity for its training weights, so
  // the opt-out only applies to the other strategies.
  if (options.fit_gps || options.strategy == NuisanceStrategy::WeightedPerLevel) {
    ProbabilityPtr gps_model =
        fit_probability(options.gps_spec, sample.covariates, sample.treatment_idx, levels);
    nuis.gps_raw = [gps_model](const Eigen::VectorXd& x) { return gps_model->predict(x); };
  }

  nuis.mu.level_values = sample.levels.values;
  const auto strata = split_by_treatment(sample);
  switch (options.strategy) {
    case NuisanceStrategy::PerLevel:
      nuis.mu.form = OutcomeModel::Form::PerLevel;
      nuis.mu.per_level = fit_per_level(sample, options.base_spec, strata, nullptr, options.seed);
      break;
    case NuisanceStrategy::WeightedPerLevel:
      nuis.mu.form = OutcomeModel::Form::PerLevel;
      nuis.mu.per_level =
          fit_per_level(sample, options.base_spec, strata, &nuis, options.seed);
      break;
    case NuisanceStrategy::Joint:
      nuis.mu.form = OutcomeModel::Form::Joint;
      nuis.mu.joint = fit_joint(sample, options.base_spec, options.seed);
      break;
  }

  if (options.fit_m) {
    nuis.m_provenance = Provenance::Estimated;
    WeightedTrainingSet data;
    data.inputs = sample.covariates;
    data.targets = sample.outcome;
    RegressorPtr m_model =
        fit_regressor(with_seed(options.base_spec, mix_seed(options.seed, 0xabcd)), data);
    nuis.m_hat = [m_model](const Eigen::VectorXd& x) { return m_model->predict(x); };
  }
  return nuis;
}

NuisanceSet exact_nuisances(const GroundTruth& truth, double clip_floor) {
  NuisanceSet nuis;
  nuis.gps_provenance = Provenance::Exact;
  nuis.outcome_provenance = Provenance::Exact;
  nuis.m_provenance = Provenance::Exact;
  nuis.clip_floor = clip_floor;
  nuis.num_levels = truth.levels.count();

  const GroundTruth frozen = truth;
  nuis.gps_raw = [frozen](const Eigen::VectorXd& x) {
    Eigen::VectorXd probs(frozen.levels.count());
    for (int k = 0; k < frozen.levels.count(); ++k) probs(k) = frozen.gps(k, x);
    return probs;
  };
  nuis.mu.form = OutcomeModel::Form::Closed;
  nuis.mu.closed = truth.response;
  nuis.mu.level_values = truth.levels.values;
  nuis.m_hat = truth.m;
  return nuis;
}

std::function<Eigen::VectorXd(const Eigen::VectorXd&)> misspecified_gps(int num_levels) {
  if (num_levels < 2) throw std::invalid_argument("misspecified_gps: need >= 2 levels");
  const Eigen::VectorXd uniform =
      Eigen::VectorXd::Constant(num_levels, 1.0 / static_cast<double>(num_levels));
  return [uniform](const Eigen::VectorXd&) { return uniform; };
}

OutcomeModel misspecified_outcome(const ObservationalSample& sample, NuisanceStrategy strategy) {
  OutcomeModel mu;
  mu.level_values = sample.levels.values;
  if (strategy == NuisanceStrategy::Joint) {
    // Intercept-only joint fit is the global outcome mean.
    const double mean = sample.outcome.mean();
    mu.form = OutcomeModel::Form::Closed;
    mu.closed = [mean](double, const Eigen::VectorXd&) { return mean; };
    return mu;
  }
  const RegressorSpec intercept_only = RegressorSpec::linear_basis(BasisSpec::intercept());
  mu.form = OutcomeModel::Form::PerLevel;
  mu.per_level = fit_per_level(sample, intercept_only, split_by_treatment(sample), nullptr, 0);
  return mu;
}

std::function<double(const Eigen::VectorXd&)> misspecified_m(const ObservationalSample& sample) {
  const double mean = sample.outcome.mean();
  return [mean](const Eigen::VectorXd&) { return mean; };
}

}  // namespace mcate
