#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "mcate/egs.hpp"
#include "mcate/ground_truth.hpp"

using namespace mcate;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

FractureRow valid_row() {
  FractureRow row;
  row.frac_length_ft = 500.0;
  row.frac_height_ft = 250.0;
  row.frac_width_in = 0.1;
  row.frac_perm_md = 30000.0;
  row.k_min_md = 0.01;
  row.k_max_md = 0.02;
  row.por_min = 0.1;
  row.por_max = 0.2;
  row.pore_pressure_psi = 5000.0;
  row.q_fracture = 10.0;
  return row;
}

}  // namespace

TEST_CASE("the surrogate table enumerates the full factorial grid") {
  const FractureTable table = surrogate_fracture_model(7);
  CHECK(table.n() == 16200);
  CHECK_NOTHROW(table.validate());

  // Same seed reproduces every output; a different seed moves the jitter.
  const FractureTable again = surrogate_fracture_model(7);
  REQUIRE(again.n() == table.n());
  bool identical = true;
  for (int i = 0; i < table.n(); ++i) {
    identical = identical && again.rows[i].q_fracture == table.rows[i].q_fracture;
  }
  CHECK(identical);

  const FractureTable other = surrogate_fracture_model(8);
  bool any_differs = false;
  for (int i = 0; i < table.n(); ++i) {
    any_differs = any_differs || other.rows[i].q_fracture != table.rows[i].q_fracture;
  }
  CHECK(any_differs);

  // The deterministic inputs do not depend on the seed.
  CHECK(other.rows[0].frac_length_ft == table.rows[0].frac_length_ft);
  CHECK(other.rows[16199].pore_pressure_psi == table.rows[16199].pore_pressure_psi);
}

TEST_CASE("table validation reports the offending data row") {
  FractureTable table;
  table.rows = {valid_row(), valid_row(), valid_row()};

  table.rows[1].frac_length_ft = 2000.0;
  CHECK_THROWS_WITH_AS(table.validate(),
                       doctest::Contains("fracture table row 2: fracture length outside"),
                       std::invalid_argument);

  table.rows[1] = valid_row();
  table.rows[2].por_min = 0.5;
  table.rows[2].por_max = 0.4;
  CHECK_THROWS_WITH_AS(table.validate(),
                       doctest::Contains("fracture table row 3: porosity pair out of order"),
                       std::invalid_argument);

  table.rows[2] = valid_row();
  table.rows[0].q_fracture = 0.0;
  CHECK_THROWS_WITH_AS(
      table.validate(),
      doctest::Contains("fracture table row 1: fracture heat output must be positive"),
      std::invalid_argument);
}

TEST_CASE("well output scales fracture output by stage count and efficiency") {
  const EfficiencyCurve fallback = EfficiencyCurve::fallback();
  WellDesign design;
  design.lateral_length_ft = 2000.0;
  design.fracture_spacing_ft = 500.0;
  CHECK(q_well(10.0, design, fallback) == 40.0);  // 10 * 4 stages * efficiency 1

  EfficiencyCurve half;
  half.knots = {{500.0, 0.5}};
  CHECK(q_well(10.0, design, half) == 20.0);

  WellDesign doubled = design;
  doubled.lateral_length_ft = 4000.0;
  CHECK(q_well(3.7, doubled, fallback) == 2.0 * q_well(3.7, design, fallback));

  CHECK_THROWS_WITH_AS(q_well(0.0, design, fallback),
                       doctest::Contains("fracture heat output must be positive"),
                       std::invalid_argument);
  WellDesign bad = design;
  bad.fracture_spacing_ft = -1.0;
  CHECK_THROWS_WITH_AS(q_well(10.0, bad, fallback),
                       doctest::Contains("dimensions must be positive"), std::invalid_argument);
  WellDesign stub = design;
  stub.lateral_length_ft = 400.0;
  CHECK_THROWS_WITH_AS(q_well(10.0, stub, fallback),
                       doctest::Contains("lateral length shorter than one fracture stage"),
                       std::invalid_argument);
}

TEST_CASE("the efficiency curve interpolates between knots and clamps outside") {
  const EfficiencyCurve curve = EfficiencyCurve::fallback();
  CHECK(curve.efficiency(100.0) == 0.4);
  CHECK(curve.efficiency(300.0) == 0.8);
  CHECK(curve.efficiency(500.0) == 1.0);
  CHECK(std::abs(curve.efficiency(150.0) - 0.525) < 1e-12);  // midpoint of 0.4 and 0.65
  CHECK(curve.efficiency(50.0) == 0.4);
  CHECK(curve.efficiency(900.0) == 1.0);

  EfficiencyCurve bad;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("no knots"), std::invalid_argument);
  bad.knots = {{-100.0, 0.5}};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("spacings must be positive"),
                       std::invalid_argument);
  bad.knots = {{100.0, 1.5}};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("efficiencies must lie in (0, 1]"),
                       std::invalid_argument);
  bad.knots = {{100.0, 0.5}, {100.0, 0.6}};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("spacings must be strictly increasing"),
                       std::invalid_argument);
  bad.knots = {{100.0, 0.5}, {200.0, 0.4}};
  CHECK_THROWS_WITH_AS(bad.validate(),
                       doctest::Contains("efficiency must not decrease with spacing"),
                       std::invalid_argument);
}

TEST_CASE("efficiency curves load from csv") {
  const auto path = temp_file("mcate_test_curve.csv");
  write_text(path, "spacing_ft,efficiency\n100,0.5\n300,0.75\n");
  const EfficiencyCurve curve = EfficiencyCurve::from_csv(path.string());
  REQUIRE(curve.knots.size() == 2);
  CHECK(curve.knots[0].first == 100.0);
  CHECK(curve.knots[1].second == 0.75);
  CHECK(std::abs(curve.efficiency(200.0) - 0.625) < 1e-12);

  write_text(path, "distance,eff\n100,0.5\n");
  CHECK_THROWS_WITH_AS(EfficiencyCurve::from_csv(path.string()),
                       doctest::Contains("header mismatch, expected: spacing_ft,efficiency"),
                       std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("fracture tables survive a csv round trip without loss") {
  const FractureTable table = surrogate_fracture_model(3);
  const auto path = temp_file("mcate_test_fracture.csv");
  export_fracture_csv(path.string(), table);
  const FractureTable back = ingest_fracture_csv(path.string());
  REQUIRE(back.n() == table.n());
  bool identical = true;
  for (int i = 0; i < table.n(); ++i) {
    const FractureRow& a = table.rows[i];
    const FractureRow& b = back.rows[i];
    identical = identical && a.frac_length_ft == b.frac_length_ft &&
                a.frac_height_ft == b.frac_height_ft && a.frac_width_in == b.frac_width_in &&
                a.frac_perm_md == b.frac_perm_md && a.k_min_md == b.k_min_md &&
                a.k_max_md == b.k_max_md && a.por_min == b.por_min && a.por_max == b.por_max &&
                a.pore_pressure_psi == b.pore_pressure_psi && a.q_fracture == b.q_fracture;
  }
  CHECK(identical);
  std::filesystem::remove(path);
}

TEST_CASE("fracture ingestion rejects malformed files") {
  const auto path = temp_file("mcate_test_bad_fracture.csv");
  const std::string header =
      "frac_length_ft,frac_height_ft,frac_width_in,frac_perm_md,k_min_md,k_max_md,por_min,"
      "por_max,pore_pressure_psi,q_fracture\n";
  const std::string row = "500,250,0.1,30000,0.01,0.02,0.1,0.2,5000,10\n";

  write_text(path, "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(ingest_fracture_csv(path.string()),
                       doctest::Contains("fracture csv: header mismatch"), std::invalid_argument);

  // The reader rejects ragged rows before the fracture-specific checks run.
  write_text(path, header + row + row + "500,250,0.1\n");
  CHECK_THROWS_AS(ingest_fracture_csv(path.string()), std::invalid_argument);

  write_text(path, header + "oops,250,0.1,30000,0.01,0.02,0.1,0.2,5000,10\n");
  CHECK_THROWS_WITH_AS(ingest_fracture_csv(path.string()),
                       doctest::Contains("fracture csv row 1 column frac_length_ft"),
                       std::invalid_argument);

  write_text(path, "");
  CHECK_THROWS_WITH_AS(ingest_fracture_csv(path.string()), doctest::Contains("empty input"),
                       std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("treatment levels map to lateral lengths") {
  const TreatmentLevels levels = egs_levels();
  REQUIRE(levels.count() == 13);
  CHECK(levels.value(0) == 0.0);
  CHECK(levels.value(6) == 0.5);
  CHECK(levels.value(12) == 1.0);
  CHECK(egs_lateral_length(0.0) == 2000.0);
  CHECK(egs_lateral_length(1.0) == 14000.0);
  CHECK(egs_lateral_length(0.5) == 8000.0);
}

TEST_CASE("observational draws are reproducible") {
  const FractureTable table = surrogate_fracture_model(1);
  const GeneratedData a = biased_sample(table, 300, 5);
  const GeneratedData b = biased_sample(table, 300, 5);
  CHECK(a.sample.covariates == b.sample.covariates);
  CHECK(a.sample.outcome == b.sample.outcome);
  CHECK(a.sample.treatment_idx == b.sample.treatment_idx);

  const GeneratedData c = biased_sample(table, 300, 6);
  CHECK(a.sample.outcome != c.sample.outcome);

  CHECK(a.sample.covariates.rows() == 300);
  CHECK(a.sample.covariates.cols() == 11);
}

TEST_CASE("noiseless outcomes match the ground-truth response") {
  const FractureTable table = surrogate_fracture_model(2);
  const GeneratedData data = biased_sample(table, 200, 9);
  bool all_match = true;
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = data.sample.covariates.row(i).transpose();
    const double t = data.sample.levels.value(data.sample.treatment_idx[i]);
    all_match = all_match && data.sample.outcome(i) == data.truth.response(t, x);
  }
  CHECK(all_match);

  // Contrasts depend only on the lateral-length ratio.
  const Eigen::VectorXd x0 = data.sample.covariates.row(0).transpose();
  for (int k = 1; k <= 12; ++k) {
    const double expected =
        std::log(egs_lateral_length(k / 12.0) / egs_lateral_length(0.0));
    CHECK(std::abs(data.truth.tau(k, x0) - expected) < 1e-12);
  }

  CHECK_NOTHROW(check_ground_truth(data.truth, data.sample.covariates.topRows(50)));

  Eigen::VectorXd unknown = Eigen::VectorXd::Constant(11, 0.123);
  CHECK_THROWS_WITH_AS(data.truth.response(0.5, unknown),
                       doctest::Contains("unknown fracture configuration"), std::out_of_range);
}

TEST_CASE("the fully randomized design assigns levels uniformly") {
  const FractureTable table = surrogate_fracture_model(4);
  EgsSampleOptions options;
  options.rct_fraction = 1.0;
  const GeneratedData data = biased_sample(table, 10000, 11, options);

  const Eigen::VectorXd x = data.sample.covariates.row(0).transpose();
  for (int k = 0; k < 13; ++k) {
    CHECK(data.truth.gps(k, x) == 1.0 / 13.0);
  }
  CHECK(data.truth.r_min == 1.0 / 13.0);

  Eigen::VectorXd freq = Eigen::VectorXd::Zero(13);
  for (const int t : data.sample.treatment_idx) freq(t) += 1.0;
  freq /= 10000.0;
  for (int k = 0; k < 13; ++k) {
    CHECK(std::abs(freq(k) - 1.0 / 13.0) < 0.02);
  }
}

TEST_CASE("the preferential design concentrates mass on the matched stratum") {
  const FractureTable table = surrogate_fracture_model(4);
  EgsSampleOptions options;
  options.rct_fraction = 0.5;
  const GeneratedData data = biased_sample(table, 10000, 12, options);

  CHECK(data.truth.r_min == 0.5 / 13.0);

  // Propensities are two-valued: the floor off stratum, floor + 0.5 on it.
  int matched = 0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::VectorXd x = data.sample.covariates.row(i).transpose();
    const double p = data.truth.gps(data.sample.treatment_idx[i], x);
    double total = 0.0;
    for (int k = 0; k < 13; ++k) {
      const double pk = data.truth.gps(k, x);
      CHECK((pk == 0.5 / 13.0 || pk == 0.5 / 13.0 + 0.5));
      total += pk;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    if (p > 0.5) matched += 1;
  }
  const double expected = 0.5 / 13.0 + 0.5;
  CHECK(std::abs(matched / 10000.0 - expected) < 0.02);
}

TEST_CASE("observational sampling validates its options") {
  FractureTable tiny;
  tiny.rows = {valid_row(), valid_row()};
  tiny.rows[1].frac_height_ft = 300.0;  // distinct inputs, no lookup conflict

  FractureTable empty;
  CHECK_THROWS_WITH_AS(biased_sample(empty, 10, 1), doctest::Contains("empty fracture table"),
                       std::invalid_argument);

  EgsSampleOptions bad;
  bad.rct_fraction = 0.0;
  CHECK_THROWS_WITH_AS(biased_sample(tiny, 10, 1, bad),
                       doctest::Contains("rct_fraction must lie in (0, 1]"), std::invalid_argument);
  bad.rct_fraction = 1.5;
  CHECK_THROWS_WITH_AS(biased_sample(tiny, 10, 1, bad),
                       doctest::Contains("rct_fraction must lie in (0, 1]"), std::invalid_argument);

  EgsSampleOptions noisy;
  noisy.sigma = -0.1;
  CHECK_THROWS_WITH_AS(biased_sample(tiny, 10, 1, noisy),
                       doctest::Contains("sigma must be nonnegative"), std::invalid_argument);

  // Two rows, 13 levels, 5 spacings: 130 distinct combinations.
  CHECK_THROWS_WITH_AS(biased_sample(tiny, 0, 1), doctest::Contains("n must lie in [1, 130]"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(biased_sample(tiny, 131, 1), doctest::Contains("n must lie in [1, 130]"),
                       std::invalid_argument);
  CHECK_NOTHROW(biased_sample(tiny, 130, 1));

  FractureTable conflicting;
  conflicting.rows = {valid_row(), valid_row()};
  conflicting.rows[1].q_fracture = 11.0;  // same inputs, different output
  CHECK_THROWS_WITH_AS(biased_sample(conflicting, 10, 1),
                       doctest::Contains("duplicate fracture inputs with conflicting outputs"),
                       std::invalid_argument);
}
