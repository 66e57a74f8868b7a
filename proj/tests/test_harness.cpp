#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mcate/experiment.hpp"

using namespace mcate;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

ConfigMap minimal_map() {
  ConfigMap map;
  map.values["dgp.n"] = "100";
  map.values["dgp.K"] = "2";
  map.values["run.learners"] = "t";
  map.values["run.seeds"] = "";  // required key; an empty list is a dry run
  return map;
}

ResultRow ok_row(const std::string& learner, const std::string& base, std::uint64_t seed,
                 double mpehe, int K = 2) {
  ResultRow row;
  row.learner = learner;
  row.base = base;
  row.scenario = "exact-exact-exact";
  row.seed = seed;
  row.K = K;
  row.n = 100;
  row.mpehe = mpehe;
  return row;
}

}  // namespace

TEST_CASE("config text supports sections, dotted keys and comments") {
  const std::string text =
      "# leading comment\n"
      "run.alpha = 1   # trailing comment\n"
      "\n"
      "[dgp]\n"
      "n = 50\n"
      "model=linear\n"
      "[run]\n"
      "learners = t, dr\n"
      "other.gamma = x\n";
  const ConfigMap map = parse_config_text(text);

  const std::map<std::string, std::string> expected = {
      {"run.alpha", "1"},
      {"dgp.n", "50"},
      {"dgp.model", "linear"},
      {"run.learners", "t, dr"},
      {"other.gamma", "x"},  // dotted keys bypass the active section
  };
  CHECK(map.values == expected);

  CHECK(map.has("dgp.n"));
  CHECK(!map.has("dgp.sigma"));
  CHECK(map.get_string("dgp.model") == "linear");
  CHECK(map.get_string("absent", "fallback") == "fallback");
  CHECK(map.get_int("dgp.n") == 50);
  CHECK(map.get_int("absent", 7) == 7);
  CHECK(map.get_double("absent", 2.5) == 2.5);
  CHECK(map.get_uint64("run.alpha", 0) == 1);
  const auto list = map.get_list("run.learners");
  REQUIRE(list.size() == 2);
  CHECK(list[0] == "t");
  CHECK(list[1] == "dr");
}

TEST_CASE("config parsing reports the offending line") {
  CHECK_THROWS_WITH_AS(parse_config_text("[dgp\n"),
                       doctest::Contains("config line 1: unterminated section header"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("a = 1\n[]\n"),
                       doctest::Contains("config line 2: empty section"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("novalue\n"),
                       doctest::Contains("config line 1: expected key = value"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("= 3\n"), doctest::Contains("config line 1: empty key"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_file("/nonexistent/mcate.cfg"),
                       doctest::Contains("config: cannot read"), std::invalid_argument);
}

TEST_CASE("typed getters validate their values") {
  ConfigMap map;
  map.values["k"] = "abc";
  CHECK_THROWS_WITH_AS(map.get_string("missing"), doctest::Contains("config: missing key 'missing'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(map.get_int("k"), doctest::Contains("config key 'k': not an integer: 'abc'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(map.get_uint64("k", 0), doctest::Contains("not an unsigned integer"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(map.get_double("k", 0.0), doctest::Contains("not a number"),
                       std::invalid_argument);
  map.values["frac"] = "1.5";
  CHECK_THROWS_WITH_AS(map.get_int("frac"), doctest::Contains("not an integer"),
                       std::invalid_argument);
  map.values["empty"] = "";
  CHECK(map.get_list("empty").empty());
}

TEST_CASE("the config hash tracks content, not layout") {
  const ConfigMap a = parse_config_text("[dgp]\nn = 50\nK=2\n");
  const ConfigMap b = parse_config_text("dgp.n=50\ndgp.K  =  2   # comment\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);

  const ConfigMap c = parse_config_text("dgp.n=51\ndgp.K=2\n");
  CHECK(config_hash(a) != config_hash(c));

  const ConfigMap d = parse_config_text("dgp.n=50\ndgp.K=2\ndgp.sigma=0.1\n");
  CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("nuisance provenance names round-trip") {
  for (const Provenance p :
       {Provenance::Exact, Provenance::Estimated, Provenance::Misspecified}) {
    CHECK(provenance_from_name(provenance_name(p)) == p);
  }
  CHECK_THROWS_WITH_AS(provenance_from_name("fuzzy"), doctest::Contains("unknown provenance"),
                       std::invalid_argument);

  Scenario scenario;
  scenario.gps = Provenance::Exact;
  scenario.outcome = Provenance::Estimated;
  scenario.m = Provenance::Misspecified;
  CHECK(scenario_name(scenario) == "exact-estimated-misspecified");
}

TEST_CASE("a minimal config fills in the documented defaults") {
  const ExperimentConfig cfg = experiment_config_from_map(minimal_map());
  CHECK(!cfg.use_egs);
  CHECK(cfg.dgp.model == DgpModel::Linear);
  CHECK(cfg.dgp.design == DgpDesign::Rct);
  CHECK(cfg.dgp.n == 100);
  CHECK(cfg.dgp.K == 2);
  CHECK(cfg.dgp.sigma == 0.1);
  CHECK(cfg.scenario.gps == Provenance::Exact);
  CHECK(cfg.scenario.outcome == Provenance::Exact);
  CHECK(cfg.scenario.m == Provenance::Exact);
  REQUIRE(cfg.learners.size() == 1);
  CHECK(cfg.learners[0] == Learner::T);
  REQUIRE(cfg.bases.size() == 1);
  CHECK(cfg.bases[0] == "linear");
  CHECK(cfg.seeds.empty());
  CHECK(cfg.gps_estimator == "mnl");
  CHECK(cfg.mu_strategy == NuisanceStrategy::PerLevel);
  CHECK(cfg.clip_floor == 1e-3);
  CHECK(cfg.output_dir == ".");
  CHECK(cfg.hash == config_hash(cfg.raw));

  ConfigMap all = minimal_map();
  all.values["run.learners"] = "all";
  CHECK(experiment_config_from_map(all).learners.size() == 8);

  ConfigMap egs;
  egs.values["dgp.source"] = "egs";
  egs.values["egs.n"] = "500";
  egs.values["run.learners"] = "dr";
  egs.values["run.seeds"] = "3";
  const ExperimentConfig ecfg = experiment_config_from_map(egs);
  CHECK(ecfg.use_egs);
  CHECK(ecfg.egs_n == 500);
  CHECK(ecfg.egs_rct_fraction == 0.5);
}

TEST_CASE("config validation names the offending key") {
  ConfigMap map = minimal_map();
  map.values.erase("run.learners");
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map),
                       doctest::Contains("config: missing key 'run.learners'"),
                       std::invalid_argument);

  map = minimal_map();
  map.values["run.learners"] = "zed";
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map), doctest::Contains("unknown learner"),
                       std::invalid_argument);

  map = minimal_map();
  map.values.erase("run.seeds");
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map),
                       doctest::Contains("config: missing key 'run.seeds'"),
                       std::invalid_argument);

  map = minimal_map();
  map.values["run.bases"] = "quux";
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map),
                       doctest::Contains("config key 'run.bases': unknown base 'quux'"),
                       std::invalid_argument);

  map = minimal_map();
  map.values["dgp.model"] = "cubic";
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map),
                       doctest::Contains("config key 'dgp.model': unknown model 'cubic'"),
                       std::invalid_argument);

  map = minimal_map();
  map.values["dgp.design"] = "quota";
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map),
                       doctest::Contains("config key 'dgp.design': unknown design 'quota'"),
                       std::invalid_argument);

  map = minimal_map();
  map.values["dgp.source"] = "census";
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map),
                       doctest::Contains("config key 'dgp.source': unknown source 'census'"),
                       std::invalid_argument);

  map = minimal_map();
  map.values["run.gps_estimator"] = "oracle";
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map),
                       doctest::Contains("config key 'run.gps_estimator': unknown estimator"),
                       std::invalid_argument);

  map = minimal_map();
  map.values["run.mu_strategy"] = "pooled";
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map),
                       doctest::Contains("config key 'run.mu_strategy': unknown strategy"),
                       std::invalid_argument);

  map = minimal_map();
  map.values["scenario.gps"] = "guessed";
  CHECK_THROWS_WITH_AS(experiment_config_from_map(map), doctest::Contains("unknown provenance"),
                       std::invalid_argument);
}

TEST_CASE("a small grid runs every learner-base-seed cell deterministically") {
  const auto dir = temp_dir("mcate_harness_grid");
  ConfigMap map;
  map.values["dgp.n"] = "400";
  map.values["dgp.K"] = "3";
  map.values["dgp.sigma"] = "0.1";
  map.values["run.learners"] = "t, dr";
  map.values["run.seeds"] = "1, 2";
  map.values["scenario.outcome"] = "estimated";
  map.values["run.output_dir"] = dir.string();
  const ExperimentConfig cfg = experiment_config_from_map(map);

  const ExperimentResult result = run_experiment(cfg);
  REQUIRE(result.rows.size() == 4);
  // Canonical order: learner, base, seed (learner names sort lexically).
  CHECK(result.rows[0].learner == "dr");
  CHECK(result.rows[0].seed == 1);
  CHECK(result.rows[1].learner == "dr");
  CHECK(result.rows[1].seed == 2);
  CHECK(result.rows[2].learner == "t");
  CHECK(result.rows[3].learner == "t");
  for (const ResultRow& row : result.rows) {
    CHECK(row.ok);
    CHECK(row.base == "linear");
    CHECK(row.scenario == "exact-estimated-exact");
    CHECK(row.K == 3);
    CHECK(row.n == 400);
    CHECK(row.mpehe >= 0.0);
    CHECK(row.wall_ms >= 0.0);
    CHECK(row.config_hash == cfg.hash);
  }

  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "timings.csv"));
  const std::string first_bytes = slurp(dir / "results.csv");

  // A rerun reproduces the persisted results bit for bit.
  run_experiment(cfg);
  CHECK(slurp(dir / "results.csv") == first_bytes);

  // Worker count does not leak into the outputs.
  setenv("MCATE_WORKERS", "1", 1);
  run_experiment(cfg);
  const std::string serial_bytes = slurp(dir / "results.csv");
  setenv("MCATE_WORKERS", "4", 1);
  run_experiment(cfg);
  const std::string threaded_bytes = slurp(dir / "results.csv");
  unsetenv("MCATE_WORKERS");
  CHECK(serial_bytes == first_bytes);
  CHECK(threaded_bytes == first_bytes);

  // The persisted rows parse back to the in-memory values.
  const std::vector<ResultRow> back = read_results_csv((dir / "results.csv").string());
  REQUIRE(back.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back[i].learner == result.rows[i].learner);
    CHECK(back[i].base == result.rows[i].base);
    CHECK(back[i].scenario == result.rows[i].scenario);
    CHECK(back[i].seed == result.rows[i].seed);
    CHECK(back[i].K == result.rows[i].K);
    CHECK(back[i].n == result.rows[i].n);
    CHECK(back[i].mpehe == result.rows[i].mpehe);
    CHECK(back[i].rlin_rank == result.rows[i].rlin_rank);
    CHECK(back[i].ok == result.rows[i].ok);
    CHECK(back[i].config_hash == result.rows[i].config_hash);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("an empty seed list produces a header-only results file") {
  const auto dir = temp_dir("mcate_harness_empty");
  ConfigMap map = minimal_map();
  map.values["run.output_dir"] = dir.string();
  const ExperimentConfig cfg = experiment_config_from_map(map);
  const ExperimentResult result = run_experiment(cfg);
  CHECK(result.rows.empty());
  const std::string bytes = slurp(dir / "results.csv");
  CHECK(bytes == "learner,base,scenario,seed,K,n,mpehe,rlin_rank,ok,error,config_hash\r\n");
  CHECK(read_results_csv((dir / "results.csv").string()).empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("failing cells record their error and the grid continues") {
  const auto dir = temp_dir("mcate_harness_fail");
  ConfigMap map;
  map.values["dgp.source"] = "egs";
  map.values["egs.n"] = "0";  // rejected per cell by the sampler
  map.values["run.learners"] = "t";
  map.values["run.seeds"] = "1, 2";
  map.values["run.output_dir"] = dir.string();
  const ExperimentConfig cfg = experiment_config_from_map(map);

  const ExperimentResult result = run_experiment(cfg);
  REQUIRE(result.rows.size() == 2);
  for (const ResultRow& row : result.rows) {
    CHECK(!row.ok);
    CHECK(row.error.find("n must lie in") != std::string::npos);
    CHECK(std::isnan(row.mpehe));
  }

  const std::vector<ResultRow> back = read_results_csv((dir / "results.csv").string());
  REQUIRE(back.size() == 2);
  CHECK(!back[0].ok);
  CHECK(std::isnan(back[0].mpehe));
  CHECK(back[0].rlin_rank == -1);
  CHECK(back[0].error.find("n must lie in") != std::string::npos);

  CHECK_THROWS_WITH_AS(emit_table(result.rows, "base"),
                       doctest::Contains("emit_table: no successful rows"), std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("result parsing rejects foreign files") {
  const auto dir = temp_dir("mcate_harness_parse");
  const auto path = dir / "results.csv";

  write_text(path, "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(read_results_csv(path.string()),
                       doctest::Contains("results csv: unexpected header"), std::invalid_argument);

  CHECK_THROWS_WITH_AS(read_results_csv((dir / "missing.csv").string()),
                       doctest::Contains("cannot open"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("the summary table bolds the best learner per column") {
  std::vector<ResultRow> rows;
  rows.push_back(ok_row("t", "linear", 1, 0.2));
  rows.push_back(ok_row("t", "linear", 2, 0.4));
  rows.push_back(ok_row("t", "tree", 1, 0.5));
  rows.push_back(ok_row("dr", "linear", 1, 0.1));
  ResultRow failed = ok_row("dr", "tree", 1, 99.0);
  failed.ok = false;
  rows.push_back(failed);  // skipped: dr keeps no tree column entry

  const std::string table = emit_table(rows, "base");
  CHECK(table ==
        "| learner | linear | tree |\n"
        "| --- | --- | --- |\n"
        "| t | 0.3 | **0.5** |\n"
        "| dr | **0.1** | - |\n");
}

TEST_CASE("summary ties within the tolerance are all bolded") {
  std::vector<ResultRow> rows;
  rows.push_back(ok_row("t", "linear", 1, 0.25));
  rows.push_back(ok_row("dr", "linear", 1, 0.25));
  rows.push_back(ok_row("m", "linear", 1, 0.9));
  const std::string table = emit_table(rows, "base");
  CHECK(table.find("| t | **0.25** |") != std::string::npos);
  CHECK(table.find("| dr | **0.25** |") != std::string::npos);
  CHECK(table.find("| m | 0.9 |") != std::string::npos);
}

TEST_CASE("level columns sort numerically, not lexically") {
  std::vector<ResultRow> rows;
  rows.push_back(ok_row("t", "linear", 1, 0.3, 2));
  rows.push_back(ok_row("t", "linear", 1, 0.2, 9));
  rows.push_back(ok_row("t", "linear", 1, 0.1, 10));
  const std::string table = emit_table(rows, "k");
  CHECK(table ==
        "| learner | 2 | 9 | 10 |\n"
        "| --- | --- | --- | --- |\n"
        "| t | **0.3** | **0.2** | **0.1** |\n");

  CHECK_THROWS_WITH_AS(emit_table(rows, "seed"),
                       doctest::Contains("emit_table: group_by must be base, scenario or k"),
                       std::invalid_argument);
}

TEST_CASE("the sweep chart draws one labeled polyline per learner") {
  KSweepResult sweep;
  sweep.K_list = {2, 4};
  sweep.learners = {Learner::T, Learner::S};
  for (const int K : sweep.K_list) {
    for (const Learner learner : sweep.learners) {
      KSweepCell cell;
      cell.K = K;
      cell.learner = learner;
      cell.per_seed_mpehe = Eigen::VectorXd::Constant(1, 0.1 * K);
      cell.mean_mpehe = 0.1 * K;
      sweep.cells.push_back(cell);
    }
  }

  const std::string svg = emit_plot_svg(sweep);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
       pos = svg.find("<polyline", pos + 1)) {
    ++polylines;
  }
  CHECK(polylines == 2);
  CHECK(svg.find(">t</text>") != std::string::npos);
  CHECK(svg.find(">s</text>") != std::string::npos);
  CHECK(emit_plot_svg(sweep) == svg);

  CHECK_THROWS_WITH_AS(emit_plot_svg(KSweepResult{}), doctest::Contains("empty sweep"),
                       std::invalid_argument);
}
