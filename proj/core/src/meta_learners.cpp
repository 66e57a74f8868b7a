#include "mcate/meta_learners.hpp"

#include <algorithm>
#include <stdexcept>

#include "mcate/ensemble.hpp"
#include "mcate/r_linear.hpp"

namespace mcate {

std::string learner_name(Learner learner) {
  switch (learner) {
    case Learner::T: return "t";
    case Learner::RegT: return "regt";
    case Learner::S: return "s";
    case Learner::NaiveX: return "nvx";
    case Learner::M: return "m";
    case Learner::Dr: return "dr";
    case Learner::X: return "x";
    case Learner::RLin: return "rlin";
  }
  throw std::logic_error("learner_name: unknown learner");
}

Learner learner_from_name(const std::string& name) {
  for (Learner learner : all_learners()) {
    if (learner_name(learner) == name) return learner;
  }
  throw std::invalid_argument("unknown learner '" + name + "'");
}

const std::vector<Learner>& all_learners() {
  static const std::vector<Learner> learners = {Learner::T,  Learner::RegT, Learner::S,
                                                Learner::NaiveX, Learner::M, Learner::Dr,
                                                Learner::X,  Learner::RLin};
  return learners;
}

double CateEstimate::predict(int k, const Eigen::VectorXd& x) const {
  if (k < 1 || k > K) throw std::invalid_argument("CateEstimate: contrast index out of range");
  return per_k[static_cast<std::size_t>(k - 1)](x);
}

namespace {

void check_contrast(const NuisanceSet& nuis, int k) {
  if (k < 1 || k >= nuis.num_levels) {
    throw std::invalid_argument("pseudo_outcome: contrast index out of range");
  }
}

}  // namespace

Eigen::VectorXd pseudo_outcome_m(const ObservationalSample& sample, const NuisanceSet& nuis,
                                 int k) {
  check_contrast(nuis, k);
  Eigen::VectorXd z(sample.n());
  for (int i = 0; i < sample.n(); ++i) {
    const Eigen::VectorXd x = sample.covariates.row(i);
    const Eigen::VectorXd r = nuis.gps(x);
    const int t = sample.treatment_idx[static_cast<std::size_t>(i)];
    const double y = sample.outcome(i);
    double value = 0.0;
    if (t == k) value += y / r(k);
    if (t == 0) value -= y / r(0);
    z(i) = value;
  }
  return z;
}

Eigen::VectorXd pseudo_outcome_dr(const ObservationalSample& sample, const NuisanceSet& nuis,
                                  int k) {
  check_contrast(nuis, k);
  Eigen::VectorXd z(sample.n());
  for (int i = 0; i < sample.n(); ++i) {
    const Eigen::VectorXd x = sample.covariates.row(i);
    const Eigen::VectorXd r = nuis.gps(x);
    const int t = sample.treatment_idx[static_cast<std::size_t>(i)];
    const double residual = sample.outcome(i) - nuis.mu.predict(t, x);
    double value = nuis.mu.predict(k, x) - nuis.mu.predict(0, x);
    if (t == k) value += residual / r(k);
    if (t == 0) value -= residual / r(0);
    z(i) = value;
  }
  return z;
}

Eigen::VectorXd pseudo_outcome_x(const ObservationalSample& sample, const NuisanceSet& nuis,
                                 int k) {
  check_contrast(nuis, k);
  Eigen::VectorXd z(sample.n());
  for (int i = 0; i < sample.n(); ++i) {
    const Eigen::VectorXd x = sample.covariates.row(i);
    const int t = sample.treatment_idx[static_cast<std::size_t>(i)];
    const double y = sample.outcome(i);
    if (t == k) {
      z(i) = y - nuis.mu.predict(0, x);
    } else {
      // Exactly one off-contrast indicator fires: the row's own level.
      z(i) = (nuis.mu.predict(k, x) - y) + (nuis.mu.predict(t, x) - nuis.mu.predict(0, x));
    }
  }
  return z;
}

RegressorPtr fit_pseudo_learner(const ObservationalSample& sample, const Eigen::VectorXd& pseudo,
                                const RegressorSpec& base, std::uint64_t seed) {
  if (pseudo.size() != sample.n()) {
    throw std::invalid_argument("fit_pseudo_learner: pseudo-outcome size mismatch");
  }
  WeightedTrainingSet data;
  data.inputs = sample.covariates;
  data.targets = pseudo;
  RegressorSpec spec = base;
  spec.seed = seed;
  return fit_regressor(spec, data);
}

CateEstimate plug_in_learner(const NuisanceSet& nuis, Learner tag) {
  if (nuis.num_levels < 2) throw std::invalid_argument("plug_in_learner: bad nuisance set");
  CateEstimate estimate;
  estimate.tag = tag;
  estimate.K = nuis.num_levels - 1;
  const OutcomeModel mu = nuis.mu;
  for (int k = 1; k <= estimate.K; ++k) {
    estimate.per_k.push_back(
        [mu, k](const Eigen::VectorXd& x) { return mu.predict(k, x) - mu.predict(0, x); });
  }
  return estimate;
}

CateEstimate pseudo_outcome_learner(Learner kind, const ObservationalSample& sample,
                                    const NuisanceSet& nuis, const RegressorSpec& base,
                                    std::uint64_t seed) {
  CateEstimate estimate;
  estimate.tag = kind;
  estimate.K = nuis.num_levels - 1;
  for (int k = 1; k <= estimate.K; ++k) {
    Eigen::VectorXd z;
    switch (kind) {
      case Learner::M: z = pseudo_outcome_m(sample, nuis, k); break;
      case Learner::Dr: z = pseudo_outcome_dr(sample, nuis, k); break;
      case Learner::X: z = pseudo_outcome_x(sample, nuis, k); break;
      default:
        throw std::invalid_argument("pseudo_outcome_learner: not a pseudo-outcome learner");
    }
    RegressorPtr fit =
        fit_pseudo_learner(sample, z, base, mix_seed(seed, static_cast<std::uint64_t>(k)));
    estimate.per_k.push_back([fit](const Eigen::VectorXd& x) { return fit->predict(x); });
  }
  return estimate;
}

CateEstimate naive_x_learner(const ObservationalSample& sample, const NuisanceSet& nuis,
                             const RegressorSpec& base, std::uint64_t seed) {
  if (nuis.mu.form == OutcomeModel::Form::Joint) {
    throw std::invalid_argument(
        "naive_x_learner: needs per-level or closed-form outcome nuisances");
  }
  const auto strata = split_by_treatment(sample);
  const auto& baseline_rows = strata[0];
  if (baseline_rows.empty()) {
    throw std::invalid_argument("naive_x_learner: baseline stratum is empty");
  }

  CateEstimate estimate;
  estimate.tag = Learner::NaiveX;
  estimate.K = nuis.num_levels - 1;
  const auto gps_raw = nuis.gps_raw;

  auto fit_on_rows = [&](const std::vector<int>& rows, const Eigen::VectorXd& targets,
                         std::uint64_t stream) {
    WeightedTrainingSet data;
    data.inputs.resize(static_cast<Eigen::Index>(rows.size()), sample.dim());
    data.targets = targets;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      data.inputs.row(static_cast<Eigen::Index>(i)) = sample.covariates.row(rows[i]);
    }
    RegressorSpec spec = base;
    spec.seed = mix_seed(seed, stream);
    return fit_regressor(spec, data);
  };

  for (int k = 1; k <= estimate.K; ++k) {
    const auto& level_rows = strata[static_cast<std::size_t>(k)];
    if (level_rows.empty()) {
      throw std::invalid_argument("naive_x_learner: stratum for level " + std::to_string(k) +
                                  " is empty");
    }
    Eigen::VectorXd d_level(static_cast<Eigen::Index>(level_rows.size()));
    for (std::size_t i = 0; i < level_rows.size(); ++i) {
      const int r = level_rows[i];
      d_level(static_cast<Eigen::Index>(i)) =
          sample.outcome(r) - nuis.mu.predict(0, sample.covariates.row(r));
    }
    Eigen::VectorXd d_base(static_cast<Eigen::Index>(baseline_rows.size()));
    for (std::size_t i = 0; i < baseline_rows.size(); ++i) {
      const int r = baseline_rows[i];
      d_base(static_cast<Eigen::Index>(i)) =
          nuis.mu.predict(k, sample.covariates.row(r)) - sample.outcome(r);
    }
    RegressorPtr tau_level = fit_on_rows(level_rows, d_level, 2 * static_cast<std::uint64_t>(k));
    RegressorPtr tau_base =
        fit_on_rows(baseline_rows, d_base, 2 * static_cast<std::uint64_t>(k) + 1);
    estimate.per_k.push_back([tau_level, tau_base, gps_raw, k](const Eigen::VectorXd& x) {
      const Eigen::VectorXd r = gps_raw(x);
      const double total = r(k) + r(0);
      // Zero on both levels blends evenly; a single zero collapses the weight.
      const double w = total > 0.0 ? r(k) / total : 0.5;
      return w * tau_level->predict(x) + (1.0 - w) * tau_base->predict(x);
    });
  }
  return estimate;
}

namespace {

bool wants(const FitAllOptions& options, Learner learner) {
  return std::find(options.learners.begin(), options.learners.end(), learner) !=
         options.learners.end();
}

}  // namespace

std::map<Learner, CateEstimate> fit_all(const ObservationalSample& sample,
                                        const GroundTruth* truth, const Scenario& scenario,
                                        const FitAllOptions& options) {
  sample.validate();
  const bool needs_truth = scenario.gps == Provenance::Exact ||
                           scenario.outcome == Provenance::Exact ||
                           scenario.m == Provenance::Exact;
  if (needs_truth && truth == nullptr) {
    throw std::invalid_argument("fit_all: scenario requests exact nuisances but no ground truth");
  }
  const int levels = sample.levels.count();

  // Propensity component, shared across learners.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gps_raw;
  switch (scenario.gps) {
    case Provenance::Exact: {
      const GroundTruth frozen = *truth;
      gps_raw = [frozen](const Eigen::VectorXd& x) {
        Eigen::VectorXd probs(frozen.levels.count());
        for (int k = 0; k < frozen.levels.count(); ++k) probs(k) = frozen.gps(k, x);
        return probs;
      };
      break;
    }
    case Provenance::Estimated: {
      ProbabilityPtr model =
          fit_probability(options.gps_spec, sample.covariates, sample.treatment_idx, levels);
      gps_raw = [model](const Eigen::VectorXd& x) { return model->predict(x); };
      break;
    }
    case Provenance::Misspecified:
      gps_raw = misspecified_gps(levels);
      break;
  }

  // Outcome components are built lazily per strategy: plug-in learners each
  // carry their defining strategy, pseudo-outcome learners follow options.
  auto build_outcome = [&](NuisanceStrategy strategy) -> OutcomeModel {
    if (scenario.outcome == Provenance::Exact) {
      OutcomeModel mu;
      mu.form = OutcomeModel::Form::Closed;
      mu.closed = truth->response;
      mu.level_values = sample.levels.values;
      return mu;
    }
    if (scenario.outcome == Provenance::Misspecified) {
      return misspecified_outcome(sample, strategy);
    }
    NuisanceOptions nopt;
    nopt.strategy = strategy;
    nopt.gps_spec = options.gps_spec;
    nopt.base_spec = options.base;
    nopt.clip_floor = options.clip_floor;
    nopt.fit_gps = false;  // only the outcome component is consumed here
    nopt.seed = options.seed;
    if (strategy == NuisanceStrategy::WeightedPerLevel) {
      // Weighted fits divide by the scenario's propensity component.
      NuisanceSet weighted;
      weighted.clip_floor = options.clip_floor;
      weighted.num_levels = levels;
      weighted.gps_raw = gps_raw;
      OutcomeModel mu;
      mu.form = OutcomeModel::Form::PerLevel;
      mu.level_values = sample.levels.values;
      const auto strata = split_by_treatment(sample);
      std::vector<RegressorPtr> fits(static_cast<std::size_t>(levels));
      for (int k = 0; k < levels; ++k) {
        const auto& rows = strata[static_cast<std::size_t>(k)];
        if (rows.empty()) {
          throw std::invalid_argument("fit_all: stratum for level " + std::to_string(k) +
                                      " is empty");
        }
        WeightedTrainingSet data;
        data.inputs.resize(static_cast<Eigen::Index>(rows.size()), sample.dim());
        data.targets.resize(static_cast<Eigen::Index>(rows.size()));
        data.weights.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const int r = rows[i];
          data.inputs.row(static_cast<Eigen::Index>(i)) = sample.covariates.row(r);
          data.targets(static_cast<Eigen::Index>(i)) = sample.outcome(r);
          data.weights(static_cast<Eigen::Index>(i)) =
              1.0 / weighted.gps(sample.covariates.row(r))(k);
        }
        RegressorSpec spec = options.base;
        spec.seed = mix_seed(options.seed, 0x200 + static_cast<std::uint64_t>(k));
        fits[static_cast<std::size_t>(k)] = fit_regressor(spec, data);
      }
      mu.per_level = std::move(fits);
      return mu;
    }
    NuisanceSet fitted = estimate_nuisances(sample, nopt);
    return fitted.mu;
  };

  auto make_nuisances = [&](NuisanceStrategy strategy) {
    NuisanceSet nuis;
    nuis.gps_provenance = scenario.gps;
    nuis.outcome_provenance = scenario.outcome;
    nuis.m_provenance = scenario.m;
    nuis.clip_floor = options.clip_floor;
    nuis.num_levels = levels;
    nuis.gps_raw = gps_raw;
    nuis.mu = build_outcome(strategy);
    return nuis;
  };

  const bool gps_affected = scenario.gps == Provenance::Misspecified;
  const bool outcome_affected = scenario.outcome == Provenance::Misspecified;
  const bool m_affected = scenario.m == Provenance::Misspecified;

  std::map<Learner, CateEstimate> out;
  for (Learner learner : options.learners) {
    if (!wants(options, learner)) continue;
    if (out.count(learner)) continue;
    CateEstimate estimate;
    switch (learner) {
      case Learner::T:
        estimate = plug_in_learner(make_nuisances(NuisanceStrategy::PerLevel), Learner::T);
        estimate.nuisance_affected = outcome_affected;
        break;
      case Learner::RegT:
        estimate =
            plug_in_learner(make_nuisances(NuisanceStrategy::WeightedPerLevel), Learner::RegT);
        estimate.nuisance_affected = outcome_affected || gps_affected;
        break;
      case Learner::S:
        estimate = plug_in_learner(make_nuisances(NuisanceStrategy::Joint), Learner::S);
        estimate.nuisance_affected = outcome_affected;
        break;
      case Learner::NaiveX:
        estimate = naive_x_learner(sample, make_nuisances(NuisanceStrategy::PerLevel),
                                   options.base, mix_seed(options.seed, 0x40));
        estimate.nuisance_affected = outcome_affected || gps_affected;
        break;
      case Learner::M:
        estimate = pseudo_outcome_learner(Learner::M, sample,
                                          make_nuisances(options.mu_strategy), options.base,
                                          mix_seed(options.seed, 0x41));
        estimate.nuisance_affected = gps_affected;
        break;
      case Learner::Dr:
        estimate = pseudo_outcome_learner(Learner::Dr, sample,
                                          make_nuisances(options.mu_strategy), options.base,
                                          mix_seed(options.seed, 0x42));
        estimate.nuisance_affected = gps_affected || outcome_affected;
        break;
      case Learner::X:
        estimate = pseudo_outcome_learner(Learner::X, sample,
                                          make_nuisances(options.mu_strategy), options.base,
                                          mix_seed(options.seed, 0x43));
        estimate.nuisance_affected = outcome_affected;
        break;
      case Learner::RLin: {
        NuisanceSet nuis = make_nuisances(options.mu_strategy);
        switch (scenario.m) {
          case Provenance::Exact:
            nuis.m_hat = truth->m;
            break;
          case Provenance::Estimated: {
            WeightedTrainingSet data;
            data.inputs = sample.covariates;
            data.targets = sample.outcome;
            RegressorSpec spec = options.base;
            spec.seed = mix_seed(options.seed, 0x44);
            RegressorPtr model = fit_regressor(spec, data);
            nuis.m_hat = [model](const Eigen::VectorXd& x) { return model->predict(x); };
            break;
          }
          case Provenance::Misspecified:
            nuis.m_hat = misspecified_m(sample);
            break;
        }
        BasisSpec basis = options.rlin_basis;
        if (basis.dimension == 0) {
          basis = sample.dim() == 1 ? BasisSpec::linear(1) : BasisSpec::intercept_norm();
        }
        const RLossSystem system = assemble_r_loss(sample, nuis, basis);
        const RSolution solution = solve_min_norm(system);
        estimate = r_linear_cate(system, solution, basis);
        estimate.nuisance_affected = gps_affected || m_affected;
        break;
      }
    }
    out.emplace(learner, std::move(estimate));
  }
  return out;
}

}  // namespace mcate
