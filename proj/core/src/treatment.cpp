#include "mcate/treatment.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcate {

TreatmentLevels::TreatmentLevels(std::vector<double> v) : values(std::move(v)) {
  if (values.size() < 2) {
    throw std::invalid_argument("TreatmentLevels: need at least two levels");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("TreatmentLevels: non-finite level");
    }
    if (i > 0 && !(values[i - 1] < values[i])) {
      throw std::invalid_argument("TreatmentLevels: levels must be strictly increasing");
    }
  }
}

TreatmentLevels TreatmentLevels::uniform_grid(int K) {
  if (K < 1) throw std::invalid_argument("uniform_grid: K must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    v[static_cast<std::size_t>(k)] = static_cast<double>(k) / static_cast<double>(K);
  }
  return TreatmentLevels(std::move(v));
}

void ObservationalSample::validate() const {
  const int rows = n();
  if (rows == 0) throw std::invalid_argument("ObservationalSample: empty sample");
  if (static_cast<int>(treatment_idx.size()) != rows) {
    throw std::invalid_argument("ObservationalSample: treatment_idx size mismatch");
  }
  if (static_cast<int>(outcome.size()) != rows) {
    throw std::invalid_argument("ObservationalSample: outcome size mismatch");
  }
  if (levels.count() < 2) {
    throw std::invalid_argument("ObservationalSample: need at least two treatment levels");
  }
  for (int i = 0; i < rows; ++i) {
    const int k = treatment_idx[static_cast<std::size_t>(i)];
    if (k < 0 || k > levels.K()) {
      throw std::invalid_argument("ObservationalSample: treatment index out of range at row " +
                                  std::to_string(i));
    }
    if (!std::isfinite(outcome(i))) {
      throw std::invalid_argument("ObservationalSample: non-finite outcome at row " +
                                  std::to_string(i));
    }
  }
  if (!covariates.allFinite()) {
    throw std::invalid_argument("ObservationalSample: non-finite covariate");
  }
}

std::vector<std::vector<int>> split_by_treatment(const ObservationalSample& s) {
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(s.levels.count()));
  for (int i = 0; i < s.n(); ++i) {
    buckets[static_cast<std::size_t>(s.treatment_idx[static_cast<std::size_t>(i)])].push_back(i);
  }
  return buckets;
}

Eigen::VectorXd clip_probabilities(const Eigen::VectorXd& p, double floor_value) {
  const auto size = p.size();
  if (size == 0) throw std::invalid_argument("clip_probabilities: empty vector");
  if (!(floor_value > 0.0) || !(floor_value < 1.0 / static_cast<double>(size))) {
    throw std::invalid_argument("clip_probabilities: floor must lie in (0, 1/size)");
  }
  Eigen::VectorXd out(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const double v = p(i);
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("clip_probabilities: entries must be finite and nonnegative");
    }
    out(i) = v < floor_value ? floor_value : v;
  }
  return out / out.sum();
}

}  // namespace mcate
