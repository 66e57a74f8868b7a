#include "mcate/probability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "mcate/tree.hpp"

namespace mcate {

ProbabilitySpec ProbabilitySpec::multinomial_logistic(BasisSpec basis) {
  ProbabilitySpec s;
  s.kind = Kind::MultinomialLogistic;
  s.basis = std::move(basis);
  return s;
}

ProbabilitySpec ProbabilitySpec::boosted_softmax(BoostParams p) {
  ProbabilitySpec s;
  s.kind = Kind::GradientBoostedSoftmax;
  s.boost = p;
  return s;
}

ProbabilitySpec ProbabilitySpec::empirical_stratum(
    std::function<int(const Eigen::VectorXd&)> binning, int bin_count) {
  ProbabilitySpec s;
  s.kind = Kind::EmpiricalStratum;
  s.binning = std::move(binning);
  s.bin_count = bin_count;
  return s;
}

namespace {

void validate_labels(const Eigen::MatrixXd& inputs, const std::vector<int>& labels,
                     int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("fit_probability: need >= 2 classes");
  if (inputs.rows() == 0) throw std::invalid_argument("fit_probability: empty data");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.rows()) {
    throw std::invalid_argument("fit_probability: label count mismatch");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw std::invalid_argument("fit_probability: label out of range");
    }
  }
}

class PointMassModel final : public ProbabilityEstimator {
 public:
  PointMassModel(int num_classes, int cls) : probs_(Eigen::VectorXd::Zero(num_classes)) {
    probs_(cls) = 1.0;
  }
  Eigen::VectorXd predict(const Eigen::VectorXd&) const override { return probs_; }
  int num_classes() const override { return static_cast<int>(probs_.size()); }
  bool degenerate() const override { return true; }

 private:
  Eigen::VectorXd probs_;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
  const double top = scores.maxCoeff();
  Eigen::VectorXd p = (scores.array() - top).exp();
  return p / p.sum();
}

class MultinomialLogisticModel final : public ProbabilityEstimator {
 public:
  MultinomialLogisticModel(BasisSpec basis, Eigen::MatrixXd theta)
      : basis_(std::move(basis)), theta_(std::move(theta)) {}

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const override {
    return softmax(theta_ * basis_.evaluate(x));
  }
  int num_classes() const override { return static_cast<int>(theta_.rows()); }

 private:
  BasisSpec basis_;
  Eigen::MatrixXd theta_;  // classes x basis dimension
};

ProbabilityPtr fit_multinomial_logistic(const ProbabilitySpec& spec,
                                        const Eigen::MatrixXd& inputs,
                                        const std::vector<int>& labels, int num_classes) {
  std::set<int> present(labels.begin(), labels.end());
  if (static_cast<int>(present.size()) < num_classes) {
    std::string missing;
    for (int c = 0; c < num_classes; ++c) {
      if (!present.count(c)) missing += (missing.empty() ? "" : ", ") + std::to_string(c);
    }
    throw std::invalid_argument("MultinomialLogistic: classes never observed: " + missing);
  }
  if (!spec.basis.evaluate || spec.basis.dimension < 1) {
    throw std::invalid_argument("MultinomialLogistic: basis not configured");
  }
  const int n = static_cast<int>(inputs.rows());
  const int p = spec.basis.dimension;
  Eigen::MatrixXd features(n, p);
  double max_sq_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    features.row(i) = spec.basis.evaluate(inputs.row(i));
    max_sq_norm = std::max(max_sq_norm, features.row(i).squaredNorm());
  }
  // The softmax log-loss gradient is Lipschitz with constant at most
  // max ||f||^2 / 2, so this fixed step is a guaranteed-descent choice.
  const double step = 2.0 / max_sq_norm;

  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(num_classes, p);
  for (int iter = 0; iter < spec.max_iterations; ++iter) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(num_classes, p);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd probs = softmax(theta * features.row(i).transpose());
      probs(labels[static_cast<std::size_t>(i)]) -= 1.0;
      grad.noalias() += probs * features.row(i);
    }
    grad /= static_cast<double>(n);
    if (grad.norm() < spec.grad_tolerance) break;
    theta.noalias() -= step * grad;
  }
  return std::make_shared<MultinomialLogisticModel>(spec.basis, std::move(theta));
}

class BoostedSoftmaxModel final : public ProbabilityEstimator {
 public:
  BoostedSoftmaxModel(std::vector<std::vector<std::shared_ptr<RegressionTree>>> trees,
                      double learning_rate, int num_classes, int input_dim)
      : trees_(std::move(trees)), learning_rate_(learning_rate), num_classes_(num_classes),
        input_dim_(input_dim) {}

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(num_classes_);
    for (int c = 0; c < num_classes_; ++c) {
      for (const auto& tree : trees_[static_cast<std::size_t>(c)]) {
        scores(c) += learning_rate_ * tree->predict(x);
      }
    }
    return softmax(scores);
  }
  int num_classes() const override { return num_classes_; }

 private:
  std::vector<std::vector<std::shared_ptr<RegressionTree>>> trees_;  // per class
  double learning_rate_;
  int num_classes_;
  int input_dim_;
};

ProbabilityPtr fit_boosted_softmax(const ProbabilitySpec& spec, const Eigen::MatrixXd& inputs,
                                   const std::vector<int>& labels, int num_classes) {
  const int n = static_cast<int>(inputs.rows());
  TreeParams tree_params;
  tree_params.max_depth = spec.boost.max_depth;
  tree_params.min_samples_leaf = spec.boost.min_samples_leaf;

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, num_classes);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  std::vector<int> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::vector<std::shared_ptr<RegressionTree>>> trees(
      static_cast<std::size_t>(num_classes));
  for (int round = 0; round < spec.boost.rounds; ++round) {
    for (int c = 0; c < num_classes; ++c) {
      Eigen::VectorXd residual(n);
      for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd p = softmax(scores.row(i).transpose());
        residual(i) = (labels[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0) - p(c);
      }
      auto tree = RegressionTree::fit_rows(inputs, residual, ones, rows, tree_params, 0, nullptr);
      for (int i = 0; i < n; ++i) {
        scores(i, c) += spec.boost.learning_rate * tree->predict(inputs.row(i));
      }
      trees[static_cast<std::size_t>(c)].push_back(std::move(tree));
    }
  }
  return std::make_shared<BoostedSoftmaxModel>(std::move(trees), spec.boost.learning_rate,
                                               num_classes, static_cast<int>(inputs.cols()));
}

class EmpiricalStratumModel final : public ProbabilityEstimator {
 public:
  EmpiricalStratumModel(std::function<int(const Eigen::VectorXd&)> binning,
                        Eigen::MatrixXd bin_probs, Eigen::VectorXd global_probs)
      : binning_(std::move(binning)), bin_probs_(std::move(bin_probs)),
        global_probs_(std::move(global_probs)) {}

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const override {
    const int bin = binning_ ? binning_(x) : 0;
    if (bin < 0 || bin >= bin_probs_.rows() || bin_probs_.row(bin).sum() <= 0.0) {
      return global_probs_;  // bin unseen in training
    }
    return bin_probs_.row(bin).transpose();
  }
  int num_classes() const override { return static_cast<int>(bin_probs_.cols()); }

 private:
  std::function<int(const Eigen::VectorXd&)> binning_;
  Eigen::MatrixXd bin_probs_;      // bins x classes
  Eigen::VectorXd global_probs_;
};

ProbabilityPtr fit_empirical_stratum(const ProbabilitySpec& spec, const Eigen::MatrixXd& inputs,
                                     const std::vector<int>& labels, int num_classes) {
  const int bins = spec.binning ? spec.bin_count : 1;
  if (bins < 1) throw std::invalid_argument("EmpiricalStratum: bin_count must be >= 1");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(bins, num_classes);
  Eigen::VectorXd global = Eigen::VectorXd::Zero(num_classes);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    int bin = spec.binning ? spec.binning(inputs.row(i)) : 0;
    if (bin < 0 || bin >= bins) {
      throw std::invalid_argument("EmpiricalStratum: binning returned out-of-range bin " +
                                  std::to_string(bin));
    }
    counts(bin, labels[static_cast<std::size_t>(i)]) += 1.0;
    global(labels[static_cast<std::size_t>(i)]) += 1.0;
  }
  for (int b = 0; b < bins; ++b) {
    const double total = counts.row(b).sum();
    if (total > 0.0) counts.row(b) /= total;
  }
  global /= global.sum();
  return std::make_shared<EmpiricalStratumModel>(spec.binning, std::move(counts),
                                                 std::move(global));
}

}  // namespace

ProbabilityPtr fit_probability(const ProbabilitySpec& spec, const Eigen::MatrixXd& inputs,
                               const std::vector<int>& labels, int num_classes) {
  validate_labels(inputs, labels, num_classes);
  const std::set<int> present(labels.begin(), labels.end());
  if (present.size() == 1) {
    return std::make_shared<PointMassModel>(num_classes, *present.begin());
  }
  switch (spec.kind) {
    case ProbabilitySpec::Kind::MultinomialLogistic:
      return fit_multinomial_logistic(spec, inputs, labels, num_classes);
    case ProbabilitySpec::Kind::GradientBoostedSoftmax:
      return fit_boosted_softmax(spec, inputs, labels, num_classes);
    case ProbabilitySpec::Kind::EmpiricalStratum:
      return fit_empirical_stratum(spec, inputs, labels, num_classes);
  }
  throw std::logic_error("fit_probability: unknown kind");
}

}  // namespace mcate
