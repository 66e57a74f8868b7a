#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mcate/egs.hpp"
#include "mcate/meta_learners.hpp"
#include "mcate/monte_carlo.hpp"
#include "mcate/synthetic.hpp"

namespace mcate {

// Line-oriented configuration: `key = value` entries, `[section]` headers
// prefixing subsequent keys with `section.`, dotted keys accepted directly,
// `#` starting a comment. Parsing trims whitespace, so layouts that differ
// only in spacing produce identical maps.
struct ConfigMap {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;  // throws when missing
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  // Comma-separated list; empty value yields an empty list.
  std::vector<std::string> get_list(const std::string& key) const;
};

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

// FNV-1a over the sorted canonical `key=value` pairs, 16 hex digits. Changes
// exactly when some parsed entry changes.
std::string config_hash(const ConfigMap& config);

std::string provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);
std::string scenario_name(const Scenario& scenario);

struct ExperimentConfig {
  // Data source: one synthetic DGP or the semi-synthetic well benchmark.
  bool use_egs = false;
  DgpConfig dgp;  // synthetic source; per-cell seed overrides dgp.seed
  std::string egs_csv;  // empty uses the built-in surrogate table
  std::uint64_t egs_surrogate_seed = 0;
  int egs_n = 0;
  double egs_rct_fraction = 0.5;
  double egs_sigma = 0.0;

  Scenario scenario;
  std::vector<Learner> learners;
  std::vector<std::string> bases;  // linear | tree | forest | boost
  std::vector<std::uint64_t> seeds;
  std::string gps_estimator = "mnl";  // mnl | boosted | stratum
  NuisanceStrategy mu_strategy = NuisanceStrategy::PerLevel;
  double clip_floor = 1e-3;
  std::string output_dir = ".";
  ConfigMap raw;  // retained for base-learner knobs and the hash
  std::string hash;
};

// Reads and validates a config file. Unknown learner/base/provenance names,
// missing required keys and malformed numbers all throw with the offending
// key in the message.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_map(const ConfigMap& map);

struct ResultRow {
  std::string learner;
  std::string base;
  std::string scenario;
  std::uint64_t seed = 0;
  int K = 0;
  int n = 0;
  double mpehe = 0.0;
  double wall_ms = 0.0;  // persisted to the timings sidecar, not results.csv
  int rlin_rank = -1;
  bool ok = true;
  std::string error;
  std::string config_hash;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // canonical order: learner, base, seed
};

// Runs the learner x base x seed grid. Cells execute concurrently (worker
// count from MCATE_WORKERS, capped by the grid size) but each cell's
// randomness comes only from its seed, so outputs are scheduling-invariant.
// A failing cell records its error in the row and the grid continues.
ExperimentResult run_experiment(const ExperimentConfig& config);

// results.csv: everything except wall_ms, bit-identical across reruns.
// timings.csv: per-row wall clock, aligned by (learner, base, seed).
void write_results_csv(const std::string& path, const ExperimentResult& result);
void write_timings_csv(const std::string& path, const ExperimentResult& result);
std::vector<ResultRow> read_results_csv(const std::string& path);

// Markdown table of mean mpehe: one row per learner, one column per group
// key ("base", "scenario" or "k"). The smallest entry per column is bolded;
// ties within 1e-12 of the minimum are all bolded. Failed rows are skipped.
std::string emit_table(const std::vector<ResultRow>& rows, const std::string& group_by);

// Line chart of mean mpehe against K, one polyline per learner, with axes
// and a legend. Pure text SVG, deterministic for a given sweep.
std::string emit_plot_svg(const KSweepResult& sweep);

}  // namespace mcate
