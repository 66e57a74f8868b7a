#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mcate/synthetic.hpp"
#include "mcate/treatment.hpp"

namespace mcate {

// One simulated single-fracture case: nine physical inputs and the heat
// extraction output of that fracture.
struct FractureRow {
  double frac_length_ft = 0.0;
  double frac_height_ft = 0.0;
  double frac_width_in = 0.0;
  double frac_perm_md = 0.0;
  double k_min_md = 0.0;
  double k_max_md = 0.0;
  double por_min = 0.0;
  double por_max = 0.0;
  double pore_pressure_psi = 0.0;
  double q_fracture = 0.0;
};

struct FractureTable {
  std::vector<FractureRow> rows;

  int n() const { return static_cast<int>(rows.size()); }
  // Physical sanity per row: every quantity positive, length in [100, 1000],
  // height in [50, 500], permeability and porosity pairs ordered, porosity
  // below one. Violations report the 1-based data row.
  void validate() const;
};

// Full-factorial single-fracture grid: 10 lengths x 10 heights x 2 widths x
// 3 permeabilities x 27 reservoir scenarios (3 permeability pairs x 3
// porosity pairs x 3 pore pressures) = 16,200 rows. The heat output is a
// smooth positive power-law surrogate in the physical inputs with a small
// seeded log-scale jitter per cell; it stands in for an external reservoir
// simulator and carries no physical calibration.
FractureTable surrogate_fracture_model(std::uint64_t seed);

// CSV exchange. Columns, in order: frac_length_ft, frac_height_ft,
// frac_width_in, frac_perm_md, k_min_md, k_max_md, por_min, por_max,
// pore_pressure_psi, q_fracture. Shortest round-trip formatting makes
// export/ingest loss-free.
FractureTable ingest_fracture_csv(const std::string& path);
void export_fracture_csv(const std::string& path, const FractureTable& table);

// Stage-spacing efficiency: piecewise-linear in spacing between knots,
// clamped to the end knots outside their range.
struct EfficiencyCurve {
  std::vector<std::pair<double, double>> knots;  // (spacing ft, efficiency)

  // Knots sorted strictly by spacing, efficiencies in (0, 1] and
  // non-decreasing.
  void validate() const;
  double efficiency(double spacing_ft) const;

  // Plausible monotone stand-in covering spacings 100..500. Not calibrated
  // to any reference data; supply a measured curve via from_csv to override.
  static EfficiencyCurve fallback();
  // CSV with columns: spacing_ft, efficiency.
  static EfficiencyCurve from_csv(const std::string& path);
};

struct WellDesign {
  double lateral_length_ft = 2000.0;
  double fracture_spacing_ft = 500.0;

  // Positive dimensions and at least one fracture stage (length >= spacing).
  void validate() const;
};

// Well-level heat output: q_fracture * (lateral length / spacing) *
// spacing efficiency. Throws on non-positive q_fracture or invalid design.
double q_well(double q_fracture, const WellDesign& design, const EfficiencyCurve& curve);

// The 13 treatment levels: lateral lengths 2000..14000 ft in 1000 ft steps,
// normalized to k/12 in [0, 1].
TreatmentLevels egs_levels();
double egs_lateral_length(double normalized_t);

struct EgsSampleOptions {
  // Probability mass assigned uniformly across levels; the remaining
  // 1 - rct_fraction lands on the row's matched stratum. 1.0 is the
  // unbiased design with constant propensity 1/13.
  double rct_fraction = 0.5;
  // Log-scale outcome noise.
  double sigma = 0.0;
  EfficiencyCurve curve = EfficiencyCurve::fallback();
};

// Observational well data with lateral length as treatment and log well
// output as outcome. Each observation draws a fracture row and a spacing
// uniformly, then assigns the level from the propensity
//   P(T = t_k | x) = rct_fraction/13 + (1 - rct_fraction) 1{stratum(x) = k},
// where the stratum ranks rows into 13 groups by fracture length (height
// breaking ties), so long laterals co-occur with large fractures. Covariates
// per row: the nine physical inputs, the spacing and its efficiency. The
// returned ground truth carries the exact propensities and the constant
// per-contrast effects log(l_k / l_0). Throws when n exceeds the number of
// distinct (row, level, spacing) combinations.
GeneratedData biased_sample(const FractureTable& table, int n, std::uint64_t seed,
                            const EgsSampleOptions& options = {});

}  // namespace mcate
