#include "mcate/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mcate/csv.hpp"
#include "mcate/metrics.hpp"
#include "mcate/parallel.hpp"

namespace mcate {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::uint64_t parse_uint64(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument(context + ": not an unsigned integer: '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      throw std::out_of_range("int range");
    }
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument(context + ": not an integer: '" + text + "'");
  }
}

std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

bool ConfigMap::has(const std::string& key) const { return values.count(key) > 0; }

std::string ConfigMap::get_string(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) {
    throw std::invalid_argument("config: missing key '" + key + "'");
  }
  return it->second;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  return parse_double(it->second, "config key '" + key + "'");
}

int ConfigMap::get_int(const std::string& key) const {
  return parse_int(get_string(key), "config key '" + key + "'");
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  return parse_int(it->second, "config key '" + key + "'");
}

std::uint64_t ConfigMap::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  return parse_uint64(it->second, "config key '" + key + "'");
}

std::vector<std::string> ConfigMap::get_list(const std::string& key) const {
  std::vector<std::string> items;
  const std::string raw = get_string(key);
  std::string current;
  for (const char c : raw + ",") {
    if (c == ',') {
      const std::string item = trim(current);
      if (!item.empty()) items.push_back(item);
      current.clear();
    } else {
      current += c;
    }
  }
  return items;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty section");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    if (!section.empty() && key.find('.') == std::string::npos) {
      key = section + "." + key;
    }
    map.values[key] = value;
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("config: cannot read " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string config_hash(const ConfigMap& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
  const auto mix = [&h](const std::string& s) {
    for (const char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [key, value] : config.values) {  // std::map iterates sorted
    mix(key);
    mix("=");
    mix(value);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Exact:
      return "exact";
    case Provenance::Estimated:
      return "estimated";
    case Provenance::Misspecified:
      return "misspecified";
  }
  throw std::logic_error("provenance_name: unhandled value");
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "exact") return Provenance::Exact;
  if (name == "estimated") return Provenance::Estimated;
  if (name == "misspecified") return Provenance::Misspecified;
  throw std::invalid_argument("unknown provenance '" + name +
                              "' (expected exact, estimated or misspecified)");
}

std::string scenario_name(const Scenario& scenario) {
  return provenance_name(scenario.gps) + "-" + provenance_name(scenario.outcome) + "-" +
         provenance_name(scenario.m);
}

ExperimentConfig experiment_config_from_map(const ConfigMap& map) {
  ExperimentConfig cfg;
  cfg.raw = map;
  cfg.hash = config_hash(map);

  const std::string source = map.get_string("dgp.source", "synthetic");
  if (source == "egs") {
    cfg.use_egs = true;
    cfg.egs_csv = map.get_string("egs.csv", "");
    cfg.egs_surrogate_seed = map.get_uint64("egs.surrogate_seed", 0);
    cfg.egs_n = map.get_int("egs.n");
    cfg.egs_rct_fraction = map.get_double("egs.rct_fraction", 0.5);
    cfg.egs_sigma = map.get_double("egs.sigma", 0.0);
  } else if (source == "synthetic") {
    const std::string model = map.get_string("dgp.model", "linear");
    if (model == "linear") {
      cfg.dgp.model = DgpModel::Linear;
    } else if (model == "hazard") {
      cfg.dgp.model = DgpModel::HazardRate;
    } else {
      throw std::invalid_argument("config key 'dgp.model': unknown model '" + model + "'");
    }
    const std::string design = map.get_string("dgp.design", "rct");
    if (design == "rct") {
      cfg.dgp.design = DgpDesign::Rct;
    } else if (design == "preferential") {
      cfg.dgp.design = DgpDesign::PreferentialSelection;
    } else {
      throw std::invalid_argument("config key 'dgp.design': unknown design '" + design + "'");
    }
    cfg.dgp.n = map.get_int("dgp.n");
    cfg.dgp.K = map.get_int("dgp.K");
    cfg.dgp.sigma = map.get_double("dgp.sigma", 0.1);
    cfg.dgp.rct_fraction = map.get_double("dgp.rct_fraction", 0.5);
    if (map.has("dgp.rct_probs")) {
      for (const std::string& item : map.get_list("dgp.rct_probs")) {
        cfg.dgp.rct_probs.push_back(parse_double(item, "config key 'dgp.rct_probs'"));
      }
    }
  } else {
    throw std::invalid_argument("config key 'dgp.source': unknown source '" + source + "'");
  }

  cfg.scenario.gps = provenance_from_name(map.get_string("scenario.gps", "exact"));
  cfg.scenario.outcome = provenance_from_name(map.get_string("scenario.outcome", "exact"));
  cfg.scenario.m = provenance_from_name(map.get_string("scenario.m", "exact"));

  for (const std::string& name : map.get_list("run.learners")) {
    if (name == "all") {
      cfg.learners = all_learners();
      break;
    }
    cfg.learners.push_back(learner_from_name(name));
  }
  if (cfg.learners.empty()) {
    throw std::invalid_argument("config key 'run.learners': no learners requested");
  }

  cfg.bases = map.has("run.bases") ? map.get_list("run.bases")
                                   : std::vector<std::string>{"linear"};
  if (cfg.bases.empty()) {
    throw std::invalid_argument("config key 'run.bases': no base learners requested");
  }
  const std::set<std::string> known_bases = {"linear", "tree", "forest", "boost"};
  for (const std::string& b : cfg.bases) {
    if (!known_bases.count(b)) {
      throw std::invalid_argument("config key 'run.bases': unknown base '" + b + "'");
    }
  }

  for (const std::string& item : map.get_list("run.seeds")) {
    cfg.seeds.push_back(parse_uint64(item, "config key 'run.seeds'"));
  }

  cfg.gps_estimator = map.get_string("run.gps_estimator", "mnl");
  if (cfg.gps_estimator != "mnl" && cfg.gps_estimator != "boosted" &&
      cfg.gps_estimator != "stratum") {
    throw std::invalid_argument("config key 'run.gps_estimator': unknown estimator '" +
                                cfg.gps_estimator + "'");
  }

  const std::string strategy = map.get_string("run.mu_strategy", "per_level");
  if (strategy == "per_level") {
    cfg.mu_strategy = NuisanceStrategy::PerLevel;
  } else if (strategy == "joint") {
    cfg.mu_strategy = NuisanceStrategy::Joint;
  } else if (strategy == "weighted") {
    cfg.mu_strategy = NuisanceStrategy::WeightedPerLevel;
  } else {
    throw std::invalid_argument("config key 'run.mu_strategy': unknown strategy '" + strategy +
                                "'");
  }

  cfg.clip_floor = map.get_double("run.clip_floor", 1e-3);
  cfg.output_dir = map.get_string("run.output_dir", ".");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_map(parse_config_file(path));
}

namespace {

RegressorSpec base_spec_from_name(const std::string& name, const ConfigMap& raw, int cov_dim,
                                  std::uint64_t seed) {
  if (name == "linear") {
    return RegressorSpec::linear_basis(BasisSpec::linear(cov_dim));
  }
  if (name == "tree") {
    TreeParams p;
    p.max_depth = raw.get_int("base.tree.max_depth", p.max_depth);
    p.min_samples_leaf = raw.get_int("base.tree.min_leaf", p.min_samples_leaf);
    return RegressorSpec::regression_tree(p);
  }
  if (name == "forest") {
    ForestParams p;
    p.num_trees = raw.get_int("base.forest.trees", p.num_trees);
    p.mtry = raw.get_int("base.forest.mtry", p.mtry);
    p.sample_fraction = raw.get_double("base.forest.sample_fraction", p.sample_fraction);
    p.bootstrap = raw.get_int("base.forest.bootstrap", p.bootstrap ? 1 : 0) != 0;
    p.tree.max_depth = raw.get_int("base.forest.max_depth", p.tree.max_depth);
    p.tree.min_samples_leaf = raw.get_int("base.forest.min_leaf", p.tree.min_samples_leaf);
    return RegressorSpec::random_forest(p, seed);
  }
  if (name == "boost") {
    BoostParams p;
    p.rounds = raw.get_int("base.boost.rounds", p.rounds);
    p.learning_rate = raw.get_double("base.boost.rate", p.learning_rate);
    p.max_depth = raw.get_int("base.boost.depth", p.max_depth);
    p.min_samples_leaf = raw.get_int("base.boost.min_leaf", p.min_samples_leaf);
    return RegressorSpec::gradient_boosted(p, seed);
  }
  throw std::invalid_argument("unknown base learner '" + name + "'");
}

ProbabilitySpec gps_spec_from_config(const ExperimentConfig& cfg, int cov_dim, int levels) {
  if (cfg.gps_estimator == "mnl") {
    return ProbabilitySpec::multinomial_logistic(BasisSpec::linear(cov_dim));
  }
  if (cfg.gps_estimator == "boosted") {
    BoostParams p;
    p.rounds = cfg.raw.get_int("base.boost.rounds", 50);
    p.learning_rate = cfg.raw.get_double("base.boost.rate", 0.3);
    p.max_depth = cfg.raw.get_int("base.boost.depth", 3);
    return ProbabilitySpec::boosted_softmax(p);
  }
  // Empirical frequencies within equal-width bins of the first covariate;
  // bin count defaults to the level count.
  const int bins = cfg.raw.get_int("run.gps_bins", levels);
  if (bins < 1) {
    throw std::invalid_argument("config key 'run.gps_bins': must be positive");
  }
  const auto binning = [bins](const Eigen::VectorXd& x) {
    const double v = x(0);
    const int b = static_cast<int>(std::floor(v * bins));
    return std::clamp(b, 0, bins - 1);
  };
  return ProbabilitySpec::empirical_stratum(binning, bins);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  // Shared read-only inputs for every grid cell.
  FractureTable table;
  if (config.use_egs) {
    table = config.egs_csv.empty() ? surrogate_fracture_model(config.egs_surrogate_seed)
                                   : ingest_fracture_csv(config.egs_csv);
  }
  const int cov_dim = config.use_egs ? 11 : covariate_dim(config.dgp.model);
  const std::string scen = scenario_name(config.scenario);

  const int num_learners = static_cast<int>(config.learners.size());
  const int num_bases = static_cast<int>(config.bases.size());
  const int num_seeds = static_cast<int>(config.seeds.size());
  const int cells = num_learners * num_bases * num_seeds;

  ExperimentResult result;
  result.rows.resize(cells);

  parallel_for(cells, [&](int cell) {
    const int l = cell / (num_bases * num_seeds);
    const int b = (cell / num_seeds) % num_bases;
    const int s = cell % num_seeds;
    const Learner learner = config.learners[l];
    const std::uint64_t seed = config.seeds[s];

    ResultRow& row = result.rows[cell];
    row.learner = learner_name(learner);
    row.base = config.bases[b];
    row.scenario = scen;
    row.seed = seed;
    row.config_hash = config.hash;

    const auto start = std::chrono::steady_clock::now();
    try {
      GeneratedData data;
      if (config.use_egs) {
        EgsSampleOptions opts;
        opts.rct_fraction = config.egs_rct_fraction;
        opts.sigma = config.egs_sigma;
        data = biased_sample(table, config.egs_n, seed, opts);
      } else {
        DgpConfig dgp = config.dgp;
        dgp.seed = seed;
        data = generate(dgp);
      }
      row.K = data.sample.levels.K();
      row.n = data.sample.n();

      FitAllOptions fit;
      fit.learners = {learner};
      fit.base = base_spec_from_name(config.bases[b], config.raw, cov_dim, seed);
      fit.gps_spec = gps_spec_from_config(config, cov_dim, data.sample.levels.count());
      fit.mu_strategy = config.mu_strategy;
      fit.clip_floor = config.clip_floor;
      fit.seed = seed;
      const auto estimates = fit_all(data.sample, &data.truth, config.scenario, fit);

      const CateEstimate& estimate = estimates.at(learner);
      row.rlin_rank = estimate.rlin_rank;
      row.mpehe = pehe(estimate, data.truth, data.sample.covariates).mpehe;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.mpehe = std::numeric_limits<double>::quiet_NaN();
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  });

  // Canonical order regardless of scheduling: the grid enumeration is already
  // learner-major, but sort explicitly so readers can rely on it.
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     if (a.learner != b.learner) return a.learner < b.learner;
                     if (a.base != b.base) return a.base < b.base;
                     return a.seed < b.seed;
                   });

  std::filesystem::create_directories(config.output_dir);
  write_results_csv(config.output_dir + "/results.csv", result);
  write_timings_csv(config.output_dir + "/timings.csv", result);
  return result;
}

void write_results_csv(const std::string& path, const ExperimentResult& result) {
  CsvTable csv;
  csv.header = {"learner", "base",      "scenario", "seed", "K",    "n",
                "mpehe",   "rlin_rank", "ok",       "error", "config_hash"};
  for (const ResultRow& row : result.rows) {
    csv.rows.push_back({row.learner, row.base, row.scenario, std::to_string(row.seed),
                        std::to_string(row.K), std::to_string(row.n),
                        row.ok ? format_double(row.mpehe) : "",
                        row.ok ? std::to_string(row.rlin_rank) : "", row.ok ? "1" : "0",
                        row.error, row.config_hash});
  }
  write_csv_file(path, csv);
}

void write_timings_csv(const std::string& path, const ExperimentResult& result) {
  CsvTable csv;
  csv.header = {"learner", "base", "seed", "wall_ms"};
  for (const ResultRow& row : result.rows) {
    csv.rows.push_back(
        {row.learner, row.base, std::to_string(row.seed), format_double(row.wall_ms)});
  }
  write_csv_file(path, csv);
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  const CsvTable csv = read_csv_file(path);
  const std::vector<std::string> expected = {"learner", "base",      "scenario", "seed",
                                             "K",       "n",         "mpehe",    "rlin_rank",
                                             "ok",      "error",     "config_hash"};
  if (csv.header != expected) {
    throw std::invalid_argument("results csv: unexpected header in " + path);
  }
  std::vector<ResultRow> rows;
  rows.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& cells = csv.rows[i];
    const std::string context = "results csv row " + std::to_string(i + 1);
    if (cells.size() != expected.size()) {
      throw std::invalid_argument(context + ": wrong field count");
    }
    ResultRow row;
    row.learner = cells[0];
    row.base = cells[1];
    row.scenario = cells[2];
    row.seed = parse_uint64(cells[3], context);
    row.K = parse_int(cells[4], context);
    row.n = parse_int(cells[5], context);
    row.ok = cells[8] == "1";
    row.mpehe = row.ok ? parse_double(cells[6], context)
                       : std::numeric_limits<double>::quiet_NaN();
    row.rlin_rank = row.ok ? parse_int(cells[7], context) : -1;
    row.error = cells[9];
    row.config_hash = cells[10];
    rows.push_back(row);
  }
  return rows;
}

std::string emit_table(const std::vector<ResultRow>& rows, const std::string& group_by) {
  if (group_by != "base" && group_by != "scenario" && group_by != "k") {
    throw std::invalid_argument("emit_table: group_by must be base, scenario or k");
  }
  const auto key_of = [&group_by](const ResultRow& row) {
    if (group_by == "base") return row.base;
    if (group_by == "scenario") return row.scenario;
    return std::to_string(row.K);
  };

  // Aggregate means per (learner, column key), skipping failed rows.
  std::set<std::string> column_set;
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> sums;
  for (const ResultRow& row : rows) {
    if (!row.ok) continue;
    const std::string key = key_of(row);
    column_set.insert(key);
    auto& [total, count] = sums[{row.learner, key}];
    total += row.mpehe;
    ++count;
  }
  if (column_set.empty()) {
    throw std::invalid_argument("emit_table: no successful rows");
  }

  std::vector<std::string> columns(column_set.begin(), column_set.end());
  if (group_by == "k") {
    std::sort(columns.begin(), columns.end(), [](const std::string& a, const std::string& b) {
      return std::stoi(a) < std::stoi(b);
    });
  }

  std::vector<std::string> row_learners;
  for (const Learner learner : all_learners()) {
    const std::string name = learner_name(learner);
    for (const std::string& col : columns) {
      if (sums.count({name, col})) {
        row_learners.push_back(name);
        break;
      }
    }
  }

  // Column minima for bolding; ties within 1e-12 all bold.
  std::map<std::string, double> col_min;
  for (const auto& [key, agg] : sums) {
    const double mean = agg.first / agg.second;
    const auto it = col_min.find(key.second);
    if (it == col_min.end() || mean < it->second) col_min[key.second] = mean;
  }

  std::string out = "| learner |";
  for (const std::string& col : columns) out += " " + col + " |";
  out += "\n| --- |";
  for (std::size_t i = 0; i < columns.size(); ++i) out += " --- |";
  out += "\n";
  for (const std::string& name : row_learners) {
    out += "| " + name + " |";
    for (const std::string& col : columns) {
      const auto it = sums.find({name, col});
      if (it == sums.end()) {
        out += " - |";
        continue;
      }
      const double mean = it->second.first / it->second.second;
      std::string cell = format_sig(mean);
      if (mean <= col_min[col] + 1e-12) cell = "**" + cell + "**";
      out += " " + cell + " |";
    }
    out += "\n";
  }
  return out;
}

std::string emit_plot_svg(const KSweepResult& sweep) {
  if (sweep.K_list.empty() || sweep.learners.empty()) {
    throw std::invalid_argument("emit_plot_svg: empty sweep");
  }
  const double width = 720.0, height = 480.0;
  const double left = 70.0, right = width - 170.0, top = 30.0, bottom = height - 50.0;

  double y_max = 0.0;
  for (const KSweepCell& c : sweep.cells) y_max = std::max(y_max, c.mean_mpehe);
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.08;
  const double x_min = sweep.K_list.front();
  const double x_max = sweep.K_list.back();
  const double x_span = x_max > x_min ? x_max - x_min : 1.0;

  const auto x_of = [&](double K) { return left + (K - x_min) / x_span * (right - left); };
  const auto y_of = [&](double v) { return bottom - v / y_max * (bottom - top); };

  const std::vector<std::string> palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_coord(width) +
         "\" height=\"" + format_coord(height) + "\" viewBox=\"0 0 " + format_coord(width) + " " +
         format_coord(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes.
  svg += "<line x1=\"" + format_coord(left) + "\" y1=\"" + format_coord(bottom) + "\" x2=\"" +
         format_coord(right) + "\" y2=\"" + format_coord(bottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + format_coord(left) + "\" y1=\"" + format_coord(top) + "\" x2=\"" +
         format_coord(left) + "\" y2=\"" + format_coord(bottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // X ticks at every swept K.
  for (const int K : sweep.K_list) {
    const double x = x_of(K);
    svg += "<line x1=\"" + format_coord(x) + "\" y1=\"" + format_coord(bottom) + "\" x2=\"" +
           format_coord(x) + "\" y2=\"" + format_coord(bottom + 5.0) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_coord(x) + "\" y=\"" + format_coord(bottom + 20.0) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + std::to_string(K) + "</text>\n";
  }
  // Y ticks.
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * i / 5.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + format_coord(left - 5.0) + "\" y1=\"" + format_coord(y) + "\" x2=\"" +
           format_coord(left) + "\" y2=\"" + format_coord(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_coord(left - 9.0) + "\" y=\"" + format_coord(y + 4.0) +
           "\" font-size=\"12\" text-anchor=\"end\">" + format_sig(v) + "</text>\n";
  }
  // Axis labels.
  svg += "<text x=\"" + format_coord((left + right) / 2.0) + "\" y=\"" +
         format_coord(height - 12.0) + "\" font-size=\"13\" text-anchor=\"middle\">number of "
         "non-baseline levels K</text>\n";
  svg += "<text x=\"18\" y=\"" + format_coord((top + bottom) / 2.0) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         format_coord((top + bottom) / 2.0) + ")\">mean mpehe</text>\n";

  for (std::size_t l = 0; l < sweep.learners.size(); ++l) {
    const std::string color = palette[l % palette.size()];
    std::string points;
    for (const int K : sweep.K_list) {
      const KSweepCell& c = sweep.cell(K, sweep.learners[l]);
      if (!points.empty()) points += " ";
      points += format_coord(x_of(K)) + "," + format_coord(y_of(c.mean_mpehe));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" +
           points + "\"/>\n";
    const double ly = top + 18.0 * static_cast<double>(l);
    svg += "<line x1=\"" + format_coord(right + 12.0) + "\" y1=\"" + format_coord(ly) +
           "\" x2=\"" + format_coord(right + 36.0) + "\" y2=\"" + format_coord(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + format_coord(right + 42.0) + "\" y=\"" + format_coord(ly + 4.0) +
           "\" font-size=\"12\">" + learner_name(sweep.learners[l]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace mcate
