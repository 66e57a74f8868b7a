#include "mcate/egs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "mcate/csv.hpp"
#include "mcate/rng.hpp"

namespace mcate {
namespace {

const std::vector<std::string> kFractureColumns = {
    "frac_length_ft", "frac_height_ft", "frac_width_in", "frac_perm_md",      "k_min_md",
    "k_max_md",       "por_min",        "por_max",       "pore_pressure_psi", "q_fracture"};

constexpr int kNumLevels = 13;
constexpr int kNumSpacings = 5;  // 100..500 ft in 100 ft steps

std::array<double, 9> physical_key(const FractureRow& row) {
  return {row.frac_length_ft, row.frac_height_ft, row.frac_width_in,
          row.frac_perm_md,   row.k_min_md,       row.k_max_md,
          row.por_min,        row.por_max,        row.pore_pressure_psi};
}

void check_positive(double v, const char* what, int data_row) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("fracture table row " + std::to_string(data_row) + ": " + what +
                                " must be positive and finite");
  }
}

double stratum_score(double frac_length_ft, double frac_height_ft) {
  // Length dominates; height only breaks ties between equal lengths (the
  // height term stays below the 100 ft length grid step on the table range).
  return frac_length_ft + frac_height_ft / 1000.0;
}

}  // namespace

void FractureTable::validate() const {
  for (int i = 0; i < n(); ++i) {
    const FractureRow& r = rows[i];
    const int data_row = i + 1;
    check_positive(r.frac_length_ft, "fracture length", data_row);
    check_positive(r.frac_height_ft, "fracture height", data_row);
    check_positive(r.frac_width_in, "fracture width", data_row);
    check_positive(r.frac_perm_md, "fracture permeability", data_row);
    check_positive(r.k_min_md, "reservoir permeability minimum", data_row);
    check_positive(r.k_max_md, "reservoir permeability maximum", data_row);
    check_positive(r.por_min, "porosity minimum", data_row);
    check_positive(r.por_max, "porosity maximum", data_row);
    check_positive(r.pore_pressure_psi, "pore pressure", data_row);
    check_positive(r.q_fracture, "fracture heat output", data_row);
    if (r.frac_length_ft < 100.0 || r.frac_length_ft > 1000.0) {
      throw std::invalid_argument("fracture table row " + std::to_string(data_row) +
                                  ": fracture length outside [100, 1000] ft");
    }
    if (r.frac_height_ft < 50.0 || r.frac_height_ft > 500.0) {
      throw std::invalid_argument("fracture table row " + std::to_string(data_row) +
                                  ": fracture height outside [50, 500] ft");
    }
    if (r.k_min_md > r.k_max_md) {
      throw std::invalid_argument("fracture table row " + std::to_string(data_row) +
                                  ": permeability pair out of order");
    }
    if (r.por_min > r.por_max || r.por_max >= 1.0) {
      throw std::invalid_argument("fracture table row " + std::to_string(data_row) +
                                  ": porosity pair out of order or not below one");
    }
  }
}

FractureTable surrogate_fracture_model(std::uint64_t seed) {
  const std::array<double, 2> widths = {0.1, 0.2};
  const std::array<double, 3> perms = {30000.0, 85000.0, 19000.0};
  const std::array<std::pair<double, double>, 3> k_pairs = {
      {{0.0054, 0.0157}, {0.054, 0.157}, {0.109, 0.314}}};
  const std::array<std::pair<double, double>, 3> por_pairs = k_pairs;
  const std::array<double, 3> pressures = {5000.0, 7000.0, 9000.0};

  const double k_ref = std::sqrt(0.0054 * 0.0157);
  const double por_ref = k_ref;

  Rng rng(seed);
  FractureTable table;
  table.rows.reserve(16200);
  for (int li = 0; li < 10; ++li) {
    const double length = 100.0 * (li + 1);
    for (int hi = 0; hi < 10; ++hi) {
      const double height = 50.0 * (hi + 1);
      for (const double width : widths) {
        for (const double perm : perms) {
          for (const auto& [k_min, k_max] : k_pairs) {
            for (const auto& [por_min, por_max] : por_pairs) {
              for (const double pressure : pressures) {
                FractureRow row;
                row.frac_length_ft = length;
                row.frac_height_ft = height;
                row.frac_width_in = width;
                row.frac_perm_md = perm;
                row.k_min_md = k_min;
                row.k_max_md = k_max;
                row.por_min = por_min;
                row.por_max = por_max;
                row.pore_pressure_psi = pressure;
                // Monotone power-law response with a +/-3% log jitter, one
                // uniform draw per cell in row order.
                const double jitter = 2.0 * rng.uniform01() - 1.0;
                row.q_fracture = 5.0 * std::pow(length / 100.0, 0.9) *
                                 std::pow(height / 50.0, 0.75) * std::pow(width / 0.1, 0.3) *
                                 std::pow(perm / 19000.0, 0.2) *
                                 std::pow(std::sqrt(k_min * k_max) / k_ref, 0.15) *
                                 std::pow(std::sqrt(por_min * por_max) / por_ref, 0.25) *
                                 std::pow(pressure / 5000.0, 0.6) * std::exp(0.03 * jitter);
                table.rows.push_back(row);
              }
            }
          }
        }
      }
    }
  }
  table.validate();
  return table;
}

FractureTable ingest_fracture_csv(const std::string& path) {
  const CsvTable csv = read_csv_file(path);
  if (csv.header != kFractureColumns) {
    std::string expected;
    for (const std::string& c : kFractureColumns) {
      if (!expected.empty()) expected += ",";
      expected += c;
    }
    throw std::invalid_argument("fracture csv: header mismatch, expected: " + expected);
  }
  FractureTable table;
  table.rows.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& cells = csv.rows[i];
    const int data_row = static_cast<int>(i) + 1;
    if (cells.size() != kFractureColumns.size()) {
      throw std::invalid_argument("fracture csv row " + std::to_string(data_row) +
                                  ": wrong field count");
    }
    const auto cell = [&](int c) {
      return parse_double(cells[c], "fracture csv row " + std::to_string(data_row) + " column " +
                                        kFractureColumns[c]);
    };
    FractureRow row;
    row.frac_length_ft = cell(0);
    row.frac_height_ft = cell(1);
    row.frac_width_in = cell(2);
    row.frac_perm_md = cell(3);
    row.k_min_md = cell(4);
    row.k_max_md = cell(5);
    row.por_min = cell(6);
    row.por_max = cell(7);
    row.pore_pressure_psi = cell(8);
    row.q_fracture = cell(9);
    table.rows.push_back(row);
  }
  table.validate();
  return table;
}

void export_fracture_csv(const std::string& path, const FractureTable& table) {
  CsvTable csv;
  csv.header = kFractureColumns;
  csv.rows.reserve(table.rows.size());
  for (const FractureRow& r : table.rows) {
    csv.rows.push_back({format_double(r.frac_length_ft), format_double(r.frac_height_ft),
                        format_double(r.frac_width_in), format_double(r.frac_perm_md),
                        format_double(r.k_min_md), format_double(r.k_max_md),
                        format_double(r.por_min), format_double(r.por_max),
                        format_double(r.pore_pressure_psi), format_double(r.q_fracture)});
  }
  write_csv_file(path, csv);
}

void EfficiencyCurve::validate() const {
  if (knots.empty()) {
    throw std::invalid_argument("efficiency curve: no knots");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto& [d, eta] = knots[i];
    if (!std::isfinite(d) || d <= 0.0) {
      throw std::invalid_argument("efficiency curve: spacings must be positive");
    }
    if (!(eta > 0.0) || eta > 1.0) {
      throw std::invalid_argument("efficiency curve: efficiencies must lie in (0, 1]");
    }
    if (i > 0) {
      if (d <= knots[i - 1].first) {
        throw std::invalid_argument("efficiency curve: spacings must be strictly increasing");
      }
      if (eta < knots[i - 1].second) {
        throw std::invalid_argument("efficiency curve: efficiency must not decrease with spacing");
      }
    }
  }
}

double EfficiencyCurve::efficiency(double spacing_ft) const {
  validate();
  if (!std::isfinite(spacing_ft)) {
    throw std::invalid_argument("efficiency curve: spacing must be finite");
  }
  if (spacing_ft <= knots.front().first) return knots.front().second;
  if (spacing_ft >= knots.back().first) return knots.back().second;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const auto& [d1, e1] = knots[i];
    if (spacing_ft == d1) return e1;  // knots reproduce exactly
    if (spacing_ft < d1) {
      const auto& [d0, e0] = knots[i - 1];
      return e0 + (e1 - e0) * (spacing_ft - d0) / (d1 - d0);
    }
  }
  return knots.back().second;  // unreachable
}

EfficiencyCurve EfficiencyCurve::fallback() {
  EfficiencyCurve curve;
  curve.knots = {{100.0, 0.4}, {200.0, 0.65}, {300.0, 0.8}, {400.0, 0.92}, {500.0, 1.0}};
  return curve;
}

EfficiencyCurve EfficiencyCurve::from_csv(const std::string& path) {
  const CsvTable csv = read_csv_file(path);
  const std::vector<std::string> expected = {"spacing_ft", "efficiency"};
  if (csv.header != expected) {
    throw std::invalid_argument("efficiency csv: header mismatch, expected: spacing_ft,efficiency");
  }
  EfficiencyCurve curve;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const int data_row = static_cast<int>(i) + 1;
    if (csv.rows[i].size() != 2) {
      throw std::invalid_argument("efficiency csv row " + std::to_string(data_row) +
                                  ": wrong field count");
    }
    const std::string context = "efficiency csv row " + std::to_string(data_row);
    curve.knots.emplace_back(parse_double(csv.rows[i][0], context + " column spacing_ft"),
                             parse_double(csv.rows[i][1], context + " column efficiency"));
  }
  curve.validate();
  return curve;
}

void WellDesign::validate() const {
  if (!std::isfinite(lateral_length_ft) || lateral_length_ft <= 0.0 ||
      !std::isfinite(fracture_spacing_ft) || fracture_spacing_ft <= 0.0) {
    throw std::invalid_argument("well design: dimensions must be positive");
  }
  if (lateral_length_ft < fracture_spacing_ft) {
    throw std::invalid_argument("well design: lateral length shorter than one fracture stage");
  }
}

double q_well(double q_fracture, const WellDesign& design, const EfficiencyCurve& curve) {
  design.validate();
  if (!(q_fracture > 0.0) || !std::isfinite(q_fracture)) {
    throw std::invalid_argument("q_well: fracture heat output must be positive");
  }
  return q_fracture * (design.lateral_length_ft / design.fracture_spacing_ft) *
         curve.efficiency(design.fracture_spacing_ft);
}

TreatmentLevels egs_levels() { return TreatmentLevels::uniform_grid(kNumLevels - 1); }

double egs_lateral_length(double normalized_t) { return 2000.0 + 12000.0 * normalized_t; }

GeneratedData biased_sample(const FractureTable& table, int n, std::uint64_t seed,
                            const EgsSampleOptions& options) {
  table.validate();
  options.curve.validate();
  if (table.n() == 0) {
    throw std::invalid_argument("biased_sample: empty fracture table");
  }
  if (!(options.rct_fraction > 0.0) || options.rct_fraction > 1.0) {
    throw std::invalid_argument("biased_sample: rct_fraction must lie in (0, 1]");
  }
  if (options.sigma < 0.0 || !std::isfinite(options.sigma)) {
    throw std::invalid_argument("biased_sample: sigma must be nonnegative");
  }
  const long long combos =
      static_cast<long long>(table.n()) * kNumLevels * static_cast<long long>(kNumSpacings);
  if (n < 1 || n > combos) {
    throw std::invalid_argument("biased_sample: n must lie in [1, " + std::to_string(combos) +
                                "]");
  }

  const int N = table.n();
  const double w = options.rct_fraction;

  // Stratum cut points: 12 interior quantiles of the score distribution.
  std::vector<double> scores(N);
  for (int i = 0; i < N; ++i) {
    scores[i] = stratum_score(table.rows[i].frac_length_ft, table.rows[i].frac_height_ft);
  }
  std::vector<double> sorted_scores = scores;
  std::sort(sorted_scores.begin(), sorted_scores.end());
  const auto cuts = std::make_shared<std::vector<double>>();
  for (int j = 1; j < kNumLevels; ++j) {
    cuts->push_back(sorted_scores[static_cast<std::size_t>(j) * N / kNumLevels]);
  }
  const auto stratum_of = [cuts](double score) {
    int s = 0;
    for (const double c : *cuts) s += score >= c ? 1 : 0;
    return s;
  };

  // Exact response lookup by the nine physical inputs.
  const auto q_lookup = std::make_shared<std::map<std::array<double, 9>, double>>();
  for (const FractureRow& row : table.rows) {
    const auto [it, inserted] = q_lookup->emplace(physical_key(row), row.q_fracture);
    if (!inserted && it->second != row.q_fracture) {
      throw std::invalid_argument(
          "biased_sample: duplicate fracture inputs with conflicting outputs");
    }
  }

  const TreatmentLevels levels = egs_levels();
  GeneratedData out;
  out.sample.levels = levels;
  out.sample.covariates.resize(n, 11);
  out.sample.treatment_idx.resize(n);
  out.sample.outcome.resize(n);

  // Per observation the draw order is: fracture row, spacing, level, noise.
  Rng rng(seed);
  std::vector<double> gps_row(kNumLevels);
  for (int i = 0; i < n; ++i) {
    const FractureRow& row = table.rows[rng.uniform_int(N)];
    const double spacing = 100.0 * (1.0 + static_cast<double>(rng.uniform_int(kNumSpacings)));
    const double eta = options.curve.efficiency(spacing);
    const int stratum = stratum_of(stratum_score(row.frac_length_ft, row.frac_height_ft));
    for (int k = 0; k < kNumLevels; ++k) {
      gps_row[static_cast<std::size_t>(k)] = w / kNumLevels + (k == stratum ? 1.0 - w : 0.0);
    }
    const int t_idx = rng.categorical(gps_row);
    const double lateral = egs_lateral_length(levels.value(t_idx));
    const double y = std::log(row.q_fracture * (lateral / spacing) * eta);

    out.sample.covariates(i, 0) = row.frac_length_ft;
    out.sample.covariates(i, 1) = row.frac_height_ft;
    out.sample.covariates(i, 2) = row.frac_width_in;
    out.sample.covariates(i, 3) = row.frac_perm_md;
    out.sample.covariates(i, 4) = row.k_min_md;
    out.sample.covariates(i, 5) = row.k_max_md;
    out.sample.covariates(i, 6) = row.por_min;
    out.sample.covariates(i, 7) = row.por_max;
    out.sample.covariates(i, 8) = row.pore_pressure_psi;
    out.sample.covariates(i, 9) = spacing;
    out.sample.covariates(i, 10) = eta;
    out.sample.treatment_idx[i] = t_idx;
    out.sample.outcome(i) = y + options.sigma * rng.normal();
  }
  out.sample.validate();

  out.truth.levels = levels;
  out.truth.sigma = options.sigma;
  out.truth.r_min = w / kNumLevels;
  out.truth.response = [q_lookup](double t, const Eigen::VectorXd& x) {
    std::array<double, 9> key;
    for (int c = 0; c < 9; ++c) key[c] = x(c);
    const auto it = q_lookup->find(key);
    if (it == q_lookup->end()) {
      throw std::out_of_range("egs ground truth: unknown fracture configuration");
    }
    return std::log(it->second * (egs_lateral_length(t) / x(9)) * x(10));
  };
  out.truth.gps = [cuts, stratum_of, w](int k, const Eigen::VectorXd& x) {
    const int stratum = stratum_of(stratum_score(x(0), x(1)));
    return w / kNumLevels + (k == stratum ? 1.0 - w : 0.0);
  };
  const auto response = out.truth.response;
  const auto gps = out.truth.gps;
  out.truth.m = [response, gps, levels](const Eigen::VectorXd& x) {
    double total = 0.0;
    for (int k = 0; k < levels.count(); ++k) {
      total += gps(k, x) * response(levels.value(k), x);
    }
    return total;
  };
  return out;
}

}  // namespace mcate
