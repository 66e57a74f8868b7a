#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "mcate/rng.hpp"
#include "mcate/synthetic.hpp"

using namespace mcate;

namespace {

DgpConfig linear_rct(int n, int K, double sigma, std::uint64_t seed) {
  DgpConfig cfg;
  cfg.model = DgpModel::Linear;
  cfg.design = DgpDesign::Rct;
  cfg.n = n;
  cfg.K = K;
  cfg.sigma = sigma;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("generation is reproducible and seed-sensitive") {
  const DgpConfig cfg = linear_rct(200, 3, 0.2, 77);
  const GeneratedData a = generate(cfg);
  const GeneratedData b = generate(cfg);
  CHECK(a.sample.covariates == b.sample.covariates);
  CHECK(a.sample.outcome == b.sample.outcome);
  CHECK(a.sample.treatment_idx == b.sample.treatment_idx);

  DgpConfig other = cfg;
  other.seed = 78;
  const GeneratedData c = generate(other);
  CHECK(a.sample.outcome != c.sample.outcome);
}

TEST_CASE("config validation") {
  DgpConfig cfg = linear_rct(100, 3, 0.1, 0);
  CHECK_NOTHROW(cfg.validate());

  DgpConfig bad = cfg;
  bad.n = 0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("n must be positive"),
                       std::invalid_argument);
  bad = cfg;
  bad.K = 0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("K must be >= 1"),
                       std::invalid_argument);
  bad = cfg;
  bad.sigma = -0.5;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("sigma must be >= 0"),
                       std::invalid_argument);
  bad = cfg;
  bad.rct_probs = {0.5, 0.5};  // wrong length for K = 3
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("rct_probs must have K+1 entries"),
                       std::invalid_argument);
  bad = cfg;
  bad.rct_probs = {0.5, 0.5, 0.25, -0.25};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.rct_probs = {0.1, 0.1, 0.1, 0.1};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("rct_probs must sum to one"),
                       std::invalid_argument);
  bad = cfg;
  bad.design = DgpDesign::PreferentialSelection;
  bad.rct_fraction = 0.0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("rct_fraction must lie in (0, 1]"),
                       std::invalid_argument);
  bad = cfg;
  bad.design = DgpDesign::PreferentialSelection;
  bad.n = 7;  // needs at least 2 (K+1) = 8
  CHECK_THROWS_WITH_AS(bad.validate(),
                       doctest::Contains("preferential selection needs n >= 2(K+1)"),
                       std::invalid_argument);
  bad = cfg;
  bad.design = DgpDesign::Rct;
  bad.rct_probs = {0.25, 0.25, 0.25, 0.25};
  CHECK_NOTHROW(bad.validate());
  bad.design = DgpDesign::PreferentialSelection;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("rct_probs only applies"),
                       std::invalid_argument);
}

TEST_CASE("noiseless outcomes equal the response surface") {
  DgpConfig cfg = linear_rct(150, 4, 0.0, 5);
  const GeneratedData data = generate(cfg);
  for (int i = 0; i < data.sample.n(); ++i) {
    const double t = data.sample.levels.value(data.sample.treatment_idx[static_cast<std::size_t>(i)]);
    const double mu = data.truth.response(t, data.sample.covariates.row(i).transpose());
    CHECK(data.sample.outcome(i) == mu);
  }
}

TEST_CASE("scalar linear model closed forms") {
  Eigen::VectorXd x(1);
  x << 0.8;
  // Effect of moving from the baseline to t = 0.5 at x = 0.8.
  const DgpConfig cfg = linear_rct(10, 4, 0.1, 0);
  const GroundTruth truth = make_ground_truth(cfg);
  CHECK(truth.tau(2, x) == doctest::Approx(0.4).epsilon(1e-15));

  Eigen::VectorXd x2(1);
  x2 << 2.0;
  CHECK(mu_true(DgpModel::Linear, 0.5, x2) == doctest::Approx(3.0).epsilon(1e-15));

  // Under a uniform RCT on the K = 9 grid, m(x) averages (1 + t_k) x.
  const DgpConfig rct9 = linear_rct(10, 9, 0.1, 0);
  Eigen::VectorXd xm(1);
  xm << 0.3;
  CHECK(m_true(rct9, xm) == doctest::Approx(1.5 * 0.3).epsilon(1e-12));
}

TEST_CASE("hazard rate model closed forms") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
  x(0) = 1.0;  // ||x|| = 1
  CHECK(mu_true(DgpModel::HazardRate, 0.0, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mu_true(DgpModel::HazardRate, 1.0, x) ==
        doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-15));

  DgpConfig cfg = linear_rct(10, 9, 0.1, 0);
  cfg.model = DgpModel::HazardRate;
  const GroundTruth truth = make_ground_truth(cfg);
  // tau at t_9 = 1: mu(1, x) - mu(0, x) = 1 + e^{-1} - 1 = e^{-1}.
  CHECK(truth.tau(9, x) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  double expected_m = 0.0;
  for (int k = 0; k <= 9; ++k) {
    const double t = k / 9.0;
    expected_m += (t + std::exp(-t)) / 10.0;
  }
  CHECK(m_true(cfg, x) == doctest::Approx(expected_m).epsilon(1e-12));
}

TEST_CASE("closed form propensities") {
  Eigen::VectorXd x(1);
  x << 0.42;

  const DgpConfig rct = linear_rct(10, 9, 0.1, 0);
  for (int k = 0; k <= 9; ++k) CHECK(gps_closed_form(rct, k, x) == doctest::Approx(0.1));

  DgpConfig pref = linear_rct(100, 9, 0.1, 0);
  pref.design = DgpDesign::PreferentialSelection;
  pref.rct_fraction = 0.5;
  const int stratum = preferential_stratum(DgpModel::Linear, 9, x);
  double total = 0.0;
  for (int k = 0; k <= 9; ++k) {
    const double r = gps_closed_form(pref, k, x);
    total += r;
    if (k == stratum) {
      CHECK(r == doctest::Approx(0.55).epsilon(1e-15));
    } else {
      CHECK(r == doctest::Approx(0.05).epsilon(1e-15));
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gps_closed_form(rct, 10, x), std::invalid_argument);
  CHECK_THROWS_AS(gps_closed_form(rct, -1, x), std::invalid_argument);
}

TEST_CASE("preferential strata tile the covariate space") {
  // Linear bins x0 evenly on [0, 1]: with K = 4 the band width is 0.2.
  Eigen::VectorXd x(1);
  x << 0.0;
  CHECK(preferential_stratum(DgpModel::Linear, 4, x) == 0);
  x << 0.19;
  CHECK(preferential_stratum(DgpModel::Linear, 4, x) == 0);
  x << 0.21;
  CHECK(preferential_stratum(DgpModel::Linear, 4, x) == 1);
  x << 0.999;
  CHECK(preferential_stratum(DgpModel::Linear, 4, x) == 4);
  x << 1.0;  // boundary clamps into the last band
  CHECK(preferential_stratum(DgpModel::Linear, 4, x) == 4);

  // HazardRate bins the normal quantile of the first coordinate. At the
  // median (x0 = 0) the band index is floor(0.5 (K+1)).
  Eigen::VectorXd z = Eigen::VectorXd::Zero(5);
  CHECK(preferential_stratum(DgpModel::HazardRate, 9, z) == 5);
  z(0) = -10.0;
  CHECK(preferential_stratum(DgpModel::HazardRate, 9, z) == 0);
  z(0) = 10.0;
  CHECK(preferential_stratum(DgpModel::HazardRate, 9, z) == 9);
}

TEST_CASE("empirical assignment frequencies match the closed propensity") {
  DgpConfig cfg = linear_rct(20000, 4, 0.0, 11);
  cfg.design = DgpDesign::PreferentialSelection;
  cfg.rct_fraction = 0.5;
  const GeneratedData data = generate(cfg);

  // Conditional frequencies per covariate stratum.
  const int L = 5;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(L, L);
  for (int i = 0; i < data.sample.n(); ++i) {
    const int s = preferential_stratum(DgpModel::Linear, 4,
                                       data.sample.covariates.row(i).transpose());
    counts(s, data.sample.treatment_idx[static_cast<std::size_t>(i)]) += 1.0;
  }
  for (int s = 0; s < L; ++s) {
    const double row_total = counts.row(s).sum();
    REQUIRE(row_total > 0.0);
    for (int k = 0; k < L; ++k) {
      const double expected = 0.1 + (s == k ? 0.5 : 0.0);
      CHECK(std::abs(counts(s, k) / row_total - expected) < 0.03);
    }
  }
}

TEST_CASE("marginal level probabilities") {
  const DgpConfig rct = linear_rct(10, 4, 0.1, 0);
  for (double rho : marginal_level_probs(rct)) CHECK(rho == doctest::Approx(0.2));

  DgpConfig skew = rct;
  skew.K = 1;
  skew.rct_probs = {0.3, 0.7};
  const auto rho = marginal_level_probs(skew);
  CHECK(rho[0] == doctest::Approx(0.3));
  CHECK(rho[1] == doctest::Approx(0.7));

  DgpConfig pref = linear_rct(100, 4, 0.1, 0);
  pref.design = DgpDesign::PreferentialSelection;
  pref.rct_fraction = 0.5;
  // Strata have equal mass, so the marginals stay uniform.
  for (double r : marginal_level_probs(pref)) CHECK(r == doctest::Approx(0.2).epsilon(1e-12));

  // Empirical check of the skewed RCT marginals.
  DgpConfig skew_big = skew;
  skew_big.n = 20000;
  skew_big.seed = 21;
  const GeneratedData data = generate(skew_big);
  int ones = 0;
  for (int idx : data.sample.treatment_idx) ones += idx;
  CHECK(std::abs(ones / 20000.0 - 0.7) < 0.02);
}

TEST_CASE("propensity lower bounds") {
  const DgpConfig rct = linear_rct(10, 4, 0.1, 0);
  CHECK(r_min_closed_form(rct) == doctest::Approx(0.2).epsilon(1e-15));

  DgpConfig skew = rct;
  skew.K = 1;
  skew.rct_probs = {0.9, 0.1};
  CHECK(r_min_closed_form(skew) == doctest::Approx(0.1).epsilon(1e-15));

  DgpConfig pref = rct;
  pref.design = DgpDesign::PreferentialSelection;
  pref.rct_fraction = 0.5;
  // Off-stratum mass w/(K+1) = 0.1.
  CHECK(r_min_closed_form(pref) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("outcome noise is independent of treatment and covariates") {
  DgpConfig cfg = linear_rct(50000, 3, 0.5, 13);
  const GeneratedData data = generate(cfg);
  Eigen::VectorXd noise(data.sample.n());
  for (int i = 0; i < data.sample.n(); ++i) {
    const double t = data.sample.levels.value(data.sample.treatment_idx[static_cast<std::size_t>(i)]);
    noise(i) = data.sample.outcome(i) -
               data.truth.response(t, data.sample.covariates.row(i).transpose());
  }
  const double mean = noise.mean();
  const double sd = std::sqrt((noise.array() - mean).square().mean());
  CHECK(std::abs(mean) < 0.01);
  CHECK(sd == doctest::Approx(0.5).epsilon(0.03));

  // Sample correlations with covariate and treatment value stay near zero.
  Eigen::VectorXd xs(data.sample.n()), ts(data.sample.n());
  for (int i = 0; i < data.sample.n(); ++i) {
    xs(i) = data.sample.covariates(i, 0);
    ts(i) = data.sample.levels.value(data.sample.treatment_idx[static_cast<std::size_t>(i)]);
  }
  const auto corr = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::ArrayXd ac = a.array() - a.mean();
    const Eigen::ArrayXd bc = b.array() - b.mean();
    return (ac * bc).mean() / std::sqrt(ac.square().mean() * bc.square().mean());
  };
  CHECK(std::abs(corr(noise, xs)) < 0.03);
  CHECK(std::abs(corr(noise, ts)) < 0.03);
}

TEST_CASE("bundled closed forms satisfy the ground truth contract") {
  for (const DgpModel model : {DgpModel::Linear, DgpModel::HazardRate}) {
    for (const DgpDesign design : {DgpDesign::Rct, DgpDesign::PreferentialSelection}) {
      DgpConfig cfg = linear_rct(100, 4, 0.1, 3);
      cfg.model = model;
      cfg.design = design;
      const GeneratedData data = generate(cfg);
      check_ground_truth(data.truth, data.sample.covariates.topRows(25));
      CHECK(data.truth.r_min == doctest::Approx(r_min_closed_form(cfg)).epsilon(1e-15));
      CHECK(data.truth.sigma == cfg.sigma);
    }
  }
}
