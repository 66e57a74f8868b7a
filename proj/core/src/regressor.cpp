#include "mcate/regressor.hpp"

#include <cmath>
#include <stdexcept>

#include "mcate/ensemble.hpp"
#include "mcate/tree.hpp"

namespace mcate {

void WeightedTrainingSet::validate() const {
  if (n() == 0) throw std::invalid_argument("WeightedTrainingSet: empty data");
  if (targets.size() != inputs.rows()) {
    throw std::invalid_argument("WeightedTrainingSet: target size mismatch");
  }
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw std::invalid_argument("WeightedTrainingSet: non-finite entries");
  }
  if (weights.size() != 0) {
    if (weights.size() != inputs.rows()) {
      throw std::invalid_argument("WeightedTrainingSet: weight size mismatch");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const double w = weights(i);
      if (!std::isfinite(w) || w < 0.0) {
        throw std::invalid_argument("WeightedTrainingSet: weights must be finite and nonnegative");
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("WeightedTrainingSet: weights sum to zero");
    }
  }
}

Eigen::VectorXd WeightedTrainingSet::normalized_weights() const {
  if (weights.size() == 0) return Eigen::VectorXd::Ones(inputs.rows());
  // Divide by the mean (not multiply by its reciprocal) so constant weight
  // vectors come out as exact ones.
  const double mean = weights.sum() / static_cast<double>(weights.size());
  return weights / mean;
}

Eigen::VectorXd Regressor::predict_all(const Eigen::MatrixXd& xs) const {
  Eigen::VectorXd out(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out(i) = predict(xs.row(i));
  return out;
}

RegressorSpec RegressorSpec::linear_basis(BasisSpec b) {
  RegressorSpec s;
  s.kind = Kind::LinearBasis;
  s.basis = std::move(b);
  return s;
}

RegressorSpec RegressorSpec::regression_tree(TreeParams p) {
  RegressorSpec s;
  s.kind = Kind::Tree;
  s.tree = p;
  return s;
}

RegressorSpec RegressorSpec::random_forest(ForestParams p, std::uint64_t seed) {
  RegressorSpec s;
  s.kind = Kind::Forest;
  s.forest = p;
  s.seed = seed;
  return s;
}

RegressorSpec RegressorSpec::gradient_boosted(BoostParams p, std::uint64_t seed) {
  RegressorSpec s;
  s.kind = Kind::Boosted;
  s.boost = p;
  s.seed = seed;
  return s;
}

RegressorPtr fit_regressor(const RegressorSpec& spec, const WeightedTrainingSet& data) {
  data.validate();
  switch (spec.kind) {
    case RegressorSpec::Kind::LinearBasis:
      return LinearBasisModel::fit(spec.basis, data, spec.allow_ridge_fallback);
    case RegressorSpec::Kind::Tree:
      return RegressionTree::fit(data, spec.tree);
    case RegressorSpec::Kind::Forest:
      return RandomForest::fit(data, spec.forest, spec.seed);
    case RegressorSpec::Kind::Boosted:
      return GradientBoosted::fit(data, spec.boost, spec.seed);
  }
  throw std::logic_error("fit_regressor: unknown kind");
}

std::shared_ptr<LinearBasisModel> LinearBasisModel::fit(const BasisSpec& basis,
                                                        const WeightedTrainingSet& data,
                                                        bool allow_ridge_fallback) {
  data.validate();
  if (!basis.evaluate || basis.dimension < 1) {
    throw std::invalid_argument("LinearBasisModel: basis not configured");
  }
  const int n = data.n();
  const int p = basis.dimension;
  if (n < p) {
    throw std::invalid_argument("LinearBasisModel: fewer rows than basis functions");
  }
  const Eigen::VectorXd w = data.normalized_weights();
  Eigen::MatrixXd features(n, p);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd f = basis.evaluate(data.inputs.row(i));
    if (f.size() != p) throw std::invalid_argument("LinearBasisModel: basis dimension mismatch");
    features.row(i) = f.transpose();
  }

  // Rescale every column to unit weighted root-mean-square before forming the
  // normal equations: features on wildly different scales otherwise make the
  // gram matrix look rank-deficient. A diagonal rescale leaves the fitted
  // function unchanged and maps coefficients back exactly.
  const double w_total = w.sum();
  Eigen::VectorXd scale(p);
  for (int j = 0; j < p; ++j) {
    const double mean_sq = features.col(j).array().square().matrix().dot(w) / w_total;
    scale(j) = mean_sq > 0.0 ? std::sqrt(mean_sq) : 1.0;
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd g(p);
  for (int i = 0; i < n; ++i) {
    g = features.row(i).transpose().cwiseQuotient(scale);
    gram.noalias() += w(i) * g * g.transpose();
    moment.noalias() += w(i) * g * data.targets(i);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
  const bool deficient = !(max_eig > 0.0) ||
                         eig.eigenvalues().minCoeff() <= 1e-12 * max_eig;
  auto model = std::make_shared<LinearBasisModel>();
  model->basis_ = basis;
  model->input_dim_ = data.dim();
  if (deficient) {
    if (!allow_ridge_fallback) {
      throw std::runtime_error("LinearBasisModel: rank-deficient design and ridge disabled");
    }
    const double lambda = 1e-8 * gram.trace() / static_cast<double>(p);
    gram.diagonal().array() += lambda;
    model->used_ridge_ = true;
  }
  model->beta_ = gram.ldlt().solve(moment).cwiseQuotient(scale);
  if (!model->beta_.allFinite()) {
    throw std::runtime_error("LinearBasisModel: solve produced non-finite coefficients");
  }
  return model;
}

double LinearBasisModel::predict(const Eigen::VectorXd& x) const {
  return basis_.evaluate(x).dot(beta_);
}

}  // namespace mcate
