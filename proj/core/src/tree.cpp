#include "mcate/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mcate {

namespace {

// Weighted mean around an anchor value. Exact for constant targets: the
// residuals are all zero, so the anchor comes back untouched.
double anchored_mean(const Eigen::VectorXd& targets, const Eigen::VectorXd& weights,
                     const std::vector<int>& rows, int lo, int hi) {
  const double anchor = targets(rows[static_cast<std::size_t>(lo)]);
  double wsum = 0.0;
  double num = 0.0;
  for (int i = lo; i < hi; ++i) {
    const int r = rows[static_cast<std::size_t>(i)];
    wsum += weights(r);
    num += weights(r) * (targets(r) - anchor);
  }
  return wsum > 0.0 ? anchor + num / wsum : anchor;
}

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
              const Eigen::VectorXd& weights, const TreeParams& params, int mtry, Rng* rng)
      : inputs_(inputs), targets_(targets), weights_(weights), params_(params),
        mtry_(mtry), rng_(rng) {
    const int d = static_cast<int>(inputs.cols());
    all_features_.resize(static_cast<std::size_t>(d));
    std::iota(all_features_.begin(), all_features_.end(), 0);
  }

  std::vector<RegressionTree::Node> build(std::vector<int> rows) {
    rows_ = std::move(rows);
    nodes_.clear();
    grow(0, static_cast<int>(rows_.size()), 0);
    return std::move(nodes_);
  }

 private:
  int grow(int lo, int hi, int depth) {
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[static_cast<std::size_t>(node_id)].value =
        anchored_mean(targets_, weights_, rows_, lo, hi);

    const int count = hi - lo;
    if (depth >= params_.max_depth || count < params_.min_samples_split ||
        count < 2 * params_.min_samples_leaf) {
      return node_id;
    }
    const BestSplit split = find_best_split(lo, hi);
    if (split.feature < 0) return node_id;

    const int mid = partition_rows(lo, hi, split.feature, split.threshold);
    if (mid == lo || mid == hi) return node_id;  // degenerate split, keep the leaf

    nodes_[static_cast<std::size_t>(node_id)].feature = split.feature;
    nodes_[static_cast<std::size_t>(node_id)].threshold = split.threshold;
    const int left = grow(lo, mid, depth + 1);
    nodes_[static_cast<std::size_t>(node_id)].left = left;
    const int right = grow(mid, hi, depth + 1);
    nodes_[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
  }

  // Candidate features in ascending order; a strict improvement rule then
  // realizes the lowest-feature, lowest-threshold tie policy.
  const std::vector<int>& candidate_features() {
    const int d = static_cast<int>(inputs_.cols());
    if (mtry_ <= 0 || mtry_ >= d || rng_ == nullptr) return all_features_;
    sampled_features_ = all_features_;
    for (int i = 0; i < mtry_; ++i) {
      const int j = i + rng_->uniform_int(d - i);
      std::swap(sampled_features_[static_cast<std::size_t>(i)],
                sampled_features_[static_cast<std::size_t>(j)]);
    }
    sampled_features_.resize(static_cast<std::size_t>(mtry_));
    std::sort(sampled_features_.begin(), sampled_features_.end());
    return sampled_features_;
  }

  BestSplit find_best_split(int lo, int hi) {
    const int count = hi - lo;
    const double node_mean = nodes_.back().value;

    BestSplit best;
    for (int feature : candidate_features()) {
      order_.clear();
      for (int i = lo; i < hi; ++i) {
        const int r = rows_[static_cast<std::size_t>(i)];
        order_.push_back({inputs_(r, feature), r});
      }
      std::sort(order_.begin(), order_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      // Totals of the anchored residuals z = y - node_mean. SSE is shift
      // invariant and the anchoring keeps constant-target gains at exact zero.
      double wsum_total = 0.0, wz_total = 0.0, wzz_total = 0.0;
      for (const auto& [value, r] : order_) {
        const double z = targets_(r) - node_mean;
        wsum_total += weights_(r);
        wz_total += weights_(r) * z;
        wzz_total += weights_(r) * z * z;
      }
      if (!(wsum_total > 0.0)) continue;
      const double sse_parent = wzz_total - wz_total * wz_total / wsum_total;

      double wsum_l = 0.0, wz_l = 0.0, wzz_l = 0.0;
      for (int i = 0; i < count - 1; ++i) {
        const auto& [value, r] = order_[static_cast<std::size_t>(i)];
        const double z = targets_(r) - node_mean;
        wsum_l += weights_(r);
        wz_l += weights_(r) * z;
        wzz_l += weights_(r) * z * z;
        const double next_value = order_[static_cast<std::size_t>(i) + 1].first;
        if (!(value < next_value)) continue;  // only between distinct values
        const int left_count = i + 1;
        if (left_count < params_.min_samples_leaf ||
            count - left_count < params_.min_samples_leaf) {
          continue;
        }
        const double wsum_r = wsum_total - wsum_l;
        if (!(wsum_l > 0.0) || !(wsum_r > 0.0)) continue;
        const double wz_r = wz_total - wz_l;
        const double wzz_r = wzz_total - wzz_l;
        const double sse_l = wzz_l - wz_l * wz_l / wsum_l;
        const double sse_r = wzz_r - wz_r * wz_r / wsum_r;
        const double gain = sse_parent - sse_l - sse_r;
        if (gain > best.gain) {
          best.feature = feature;
          best.threshold = 0.5 * (value + next_value);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  // Stable two-pass partition so the row order inside children does not
  // depend on the standard library's std::partition strategy.
  int partition_rows(int lo, int hi, int feature, double threshold) {
    scratch_.clear();
    for (int i = lo; i < hi; ++i) {
      const int r = rows_[static_cast<std::size_t>(i)];
      if (inputs_(r, feature) <= threshold) scratch_.push_back(r);
    }
    const int mid = lo + static_cast<int>(scratch_.size());
    for (int i = lo; i < hi; ++i) {
      const int r = rows_[static_cast<std::size_t>(i)];
      if (!(inputs_(r, feature) <= threshold)) scratch_.push_back(r);
    }
    std::copy(scratch_.begin(), scratch_.end(), rows_.begin() + lo);
    return mid;
  }

  const Eigen::MatrixXd& inputs_;
  const Eigen::VectorXd& targets_;
  const Eigen::VectorXd& weights_;
  const TreeParams& params_;
  int mtry_;
  Rng* rng_;
  std::vector<int> rows_;
  std::vector<int> all_features_;
  std::vector<int> sampled_features_;
  std::vector<std::pair<double, int>> order_;
  std::vector<int> scratch_;
  std::vector<RegressionTree::Node> nodes_;
};

}  // namespace

std::shared_ptr<RegressionTree> RegressionTree::fit(const WeightedTrainingSet& data,
                                                    const TreeParams& params) {
  data.validate();
  std::vector<int> rows(static_cast<std::size_t>(data.n()));
  std::iota(rows.begin(), rows.end(), 0);
  const Eigen::VectorXd w = data.normalized_weights();
  return fit_rows(data.inputs, data.targets, w, std::move(rows), params, 0, nullptr);
}

std::shared_ptr<RegressionTree> RegressionTree::fit_rows(const Eigen::MatrixXd& inputs,
                                                         const Eigen::VectorXd& targets,
                                                         const Eigen::VectorXd& weights,
                                                         std::vector<int> rows,
                                                         const TreeParams& params, int mtry,
                                                         Rng* rng) {
  if (rows.empty()) throw std::invalid_argument("RegressionTree: no rows to fit");
  if (params.max_depth < 0 || params.min_samples_leaf < 1 || params.min_samples_split < 2) {
    throw std::invalid_argument("RegressionTree: invalid parameters");
  }
  auto tree = std::make_shared<RegressionTree>();
  tree->input_dim_ = static_cast<int>(inputs.cols());
  TreeBuilder builder(inputs, targets, weights, params, mtry, rng);
  tree->nodes_ = builder.build(std::move(rows));
  return tree;
}

double RegressionTree::predict(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim_) {
    throw std::invalid_argument("RegressionTree: input dimension mismatch");
  }
  int node = 0;
  while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    node = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes_[static_cast<std::size_t>(node)].value;
}

}  // namespace mcate
