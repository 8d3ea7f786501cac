#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "socsamp/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using socsamp::run_command;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("socsamp_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& child = "") const {
    return child.empty() ? path.string() : (path / child).string();
  }
};

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) { return json::parse(read_file(path)); }

const char* kSmallGrid = R"({"schema_version":1,"grid":{
  "n_agents":[300],"n_options":[4],"n_rounds":[30],
  "true_best_rate":[0.7],"assumed_best_rate":[0.7],"gamma":[1.0],
  "repetitions":10}})";

const char* kSynthConfig = R"({"schema_version":1,"market":{
  "n_users":8,"n_days":50,"decisions_per_day":12,
  "generator_model":{"family":"social_sampling","eta":0.8,"gamma":1.0},
  "best_skill":0.8,"unfollow_rate":0.05,"seed":5,"window_days":15}})";

}  // namespace

TEST_CASE("input errors exit with code 2") {
  std::string err;
  CHECK(run({"simulate"}, nullptr, &err) == 2);  // --config missing
  CHECK(run({"bogus"}, nullptr, &err) == 2);
  CHECK(run({"fit"}, nullptr, &err) == 2);  // --panel required

  TempDir dir("badcfg");
  write_file(dir.str("cfg.json"), "{not json");
  CHECK(run({"--config", dir.str("cfg.json"), "--out", dir.str(), "simulate"}, nullptr, &err) ==
        2);
  write_file(dir.str("cfg2.json"), R"({"schema_version":9,"grid":{}})");
  CHECK(run({"--config", dir.str("cfg2.json"), "--out", dir.str(), "simulate"}, nullptr,
            &err) == 2);
}

TEST_CASE("cell caps exit with code 3") {
  TempDir dir("cap");
  write_file(dir.str("cfg.json"), R"({"schema_version":1,"grid":{
    "n_agents":[100],"n_options":[2],"n_rounds":[5],
    "gamma":[0,0.5,1,2],"repetitions":2,"max_cells":3}})");
  std::string err;
  CHECK(run({"--config", dir.str("cfg.json"), "--out", dir.str(), "simulate"}, nullptr, &err) ==
        3);
  CHECK(err.find("cap") != std::string::npos);
}

TEST_CASE("simulate writes csv, json and a replayable manifest") {
  TempDir dir("sim");
  write_file(dir.str("cfg.json"), kSmallGrid);
  CHECK(run({"--config", dir.str("cfg.json"), "--out", dir.str("run"), "simulate"}) == 0);
  CHECK(fs::exists(dir.str("run/sweep.csv")));
  CHECK(fs::exists(dir.str("run/sweep.json")));

  const json manifest = read_json(dir.str("run/manifest.json"));
  CHECK(manifest.at("command") == "simulate");
  CHECK(manifest.at("seed") == 0);  // default seed recorded
  CHECK(manifest.at("config").at("grid").at("seed") == 0);
  CHECK(manifest.at("outputs").size() == 2);
  REQUIRE(manifest.at("inputs").size() == 1);
  CHECK(manifest.at("inputs")[0].at("sha256").get<std::string>().size() == 64);

  // One cell -> 4 statistic rows + header.
  std::istringstream csv(read_file(dir.str("run/sweep.csv")));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 5);

  // Byte-identical on a second run, and on a manifest replay.
  CHECK(run({"--config", dir.str("cfg.json"), "--out", dir.str("run2"), "simulate"}) == 0);
  CHECK(read_file(dir.str("run/sweep.csv")) == read_file(dir.str("run2/sweep.csv")));
  CHECK(read_file(dir.str("run/sweep.json")) == read_file(dir.str("run2/sweep.json")));

  std::ostringstream out, err;
  CHECK(socsamp::replay_manifest(dir.str("run/manifest.json"), dir.str("replay"), out, err) ==
        0);
  CHECK(read_file(dir.str("run/sweep.csv")) == read_file(dir.str("replay/sweep.csv")));
}

TEST_CASE("seed flag overrides the config seed") {
  TempDir dir("seed");
  write_file(dir.str("cfg.json"), kSmallGrid);
  CHECK(run({"--config", dir.str("cfg.json"), "--out", dir.str("a"), "--seed", "9",
             "simulate"}) == 0);
  CHECK(run({"--config", dir.str("cfg.json"), "--out", dir.str("b"), "simulate"}) == 0);
  CHECK(read_json(dir.str("a/manifest.json")).at("seed") == 9);
  CHECK(read_file(dir.str("a/sweep.csv")) != read_file(dir.str("b/sweep.csv")));
}

TEST_CASE("synth then ingest reproduces the ground-truth panel byte for byte") {
  TempDir dir("roundtrip");
  write_file(dir.str("cfg.json"), kSynthConfig);
  CHECK(run({"--config", dir.str("cfg.json"), "--out", dir.str("synth"), "synth"}) == 0);
  CHECK(fs::exists(dir.str("synth/trades.csv")));
  CHECK(fs::exists(dir.str("synth/ground_truth.json")));

  CHECK(run({"--out", dir.str("ingest"), "ingest", "--trades", dir.str("synth/trades.csv"),
             "--window", "15"}) == 0);
  CHECK(read_file(dir.str("synth/panel.csv")) == read_file(dir.str("ingest/panel.csv")));

  // Determinism: regenerate and replay.
  CHECK(run({"--config", dir.str("cfg.json"), "--out", dir.str("synth2"), "synth"}) == 0);
  CHECK(read_file(dir.str("synth/trades.csv")) == read_file(dir.str("synth2/trades.csv")));
  std::ostringstream out, err;
  CHECK(socsamp::replay_manifest(dir.str("ingest/manifest.json"), dir.str("replay"), out,
                                 err) == 0);
  CHECK(read_file(dir.str("ingest/panel.csv")) == read_file(dir.str("replay/panel.csv")));
}

TEST_CASE("ingest reports quarantined rows in the manifest diagnostics") {
  TempDir dir("quarantine");
  std::ostringstream log;
  log << "trade_id,user_id,open_date,close_date,asset,amount_invested,units,leverage,"
         "open_rate,close_rate,net_profit,parent_trade_id,mirror_id\n";
  for (int day = 6; day <= 26; ++day) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,1,2011-06-%02d,2011-06-%02d,EURUSD,10,10,1,1,1.1,1,,\n",
                  day, day, day);
    log << buf;
  }
  log << "99,1,2011-06-20,2011-06-10,EURUSD,10,10,1,1,1.1,1,,\n";  // inverted dates
  write_file(dir.str("trades.csv"), log.str());
  CHECK(run({"--out", dir.str("run"), "ingest", "--trades", dir.str("trades.csv"), "--window",
             "5"}) == 0);
  const json manifest = read_json(dir.str("run/manifest.json"));
  CHECK(manifest.at("diagnostics").at("quarantined_rows") == 1);
  CHECK(manifest.at("diagnostics").at("diagnostic_count") == 1);
}

TEST_CASE("ingest metric flag switches the performance column") {
  TempDir dir("metric");
  write_file(dir.str("cfg.json"), kSynthConfig);
  REQUIRE(run({"--config", dir.str("cfg.json"), "--out", dir.str("synth"), "synth"}) == 0);
  CHECK(run({"--out", dir.str("roi"), "ingest", "--trades", dir.str("synth/trades.csv"),
             "--window", "15"}) == 0);
  CHECK(run({"--out", dir.str("pct"), "ingest", "--trades", dir.str("synth/trades.csv"),
             "--window", "15", "--metric", "percent"}) == 0);
  CHECK(read_file(dir.str("roi/panel.csv")) != read_file(dir.str("pct/panel.csv")));
  CHECK(run({"--out", dir.str("bad"), "ingest", "--trades", dir.str("synth/trades.csv"),
             "--metric", "nope"}) == 2);
}

TEST_CASE("fit command emits fit json, profile csv and skill intervals") {
  TempDir dir("fit");
  write_file(dir.str("cfg.json"), kSynthConfig);
  REQUIRE(run({"--config", dir.str("cfg.json"), "--out", dir.str("synth"), "synth"}) == 0);

  CHECK(run({"--out", dir.str("fit"), "fit", "--panel", dir.str("synth/panel.csv"),
             "--family", "social_sampling", "--gamma-profile", "0.5,1,2",
             "--skill-intervals", "--trades", dir.str("synth/trades.csv"), "--top", "5"}) == 0);
  const json fit = read_json(dir.str("fit/fit.json"));
  CHECK(fit.at("family") == "social_sampling");
  CHECK(fit.at("fit").at("model").at("eta").get<double>() > 0.5);
  CHECK(fit.at("fit").at("model").at("eta").get<double>() < 1.0);

  std::istringstream profile(read_file(dir.str("fit/gamma_profile.csv")));
  std::string line;
  int lines = 0;
  while (std::getline(profile, line)) ++lines;
  CHECK(lines == 4);  // header + 3 grid points

  std::istringstream skills(read_file(dir.str("fit/skill_intervals.csv")));
  lines = 0;
  while (std::getline(skills, line)) ++lines;
  CHECK(lines == 6);  // header + top 5

  // Popularity family: no free parameters, likelihood only.
  CHECK(run({"--out", dir.str("pop"), "fit", "--panel", dir.str("synth/panel.csv"),
             "--family", "popularity"}) == 0);
  const json pop = read_json(dir.str("pop/fit.json"));
  CHECK(pop.at("fit").at("iterations") == 0);
  CHECK(pop.at("fit").at("converged") == true);

  // Replay determinism.
  std::ostringstream out, err;
  CHECK(socsamp::replay_manifest(dir.str("fit/manifest.json"), dir.str("replay"), out, err) ==
        0);
  CHECK(read_file(dir.str("fit/fit.json")) == read_file(dir.str("replay/fit.json")));
  CHECK(read_file(dir.str("fit/gamma_profile.csv")) ==
        read_file(dir.str("replay/gamma_profile.csv")));
}

TEST_CASE("evaluate command emits reports, binned summaries and ols results") {
  TempDir dir("eval");
  write_file(dir.str("cfg.json"), kSynthConfig);
  REQUIRE(run({"--config", dir.str("cfg.json"), "--out", dir.str("synth"), "synth"}) == 0);

  CHECK(run({"--out", dir.str("eval"), "--seed", "3", "evaluate", "--panel",
             dir.str("synth/panel.csv"), "--scheme", "temporal", "--fraction", "0.2"}) == 0);
  CHECK(fs::exists(dir.str("eval/error_report.csv")));
  CHECK(fs::exists(dir.str("eval/error_report.json")));
  CHECK(fs::exists(dir.str("eval/ols.json")));
  CHECK(fs::exists(dir.str("eval/binned_observed.csv")));
  CHECK(fs::exists(dir.str("eval/binned_social_sampling.csv")));
  CHECK(fs::exists(dir.str("eval/binned_popularity.csv")));

  const json report = read_json(dir.str("eval/error_report.json"));
  CHECK(report.at("families").size() == 6);
  CHECK(report.at("relative_to_social_sampling").size() == 5);
  CHECK(report.at("scheme").at("kind") == "temporal");

  // Default bins: 4 popularity x 2 performance cells + header.
  std::istringstream binned(read_file(dir.str("eval/binned_observed.csv")));
  std::string line;
  int lines = 0;
  while (std::getline(binned, line)) ++lines;
  CHECK(lines == 9);

  const json ols = read_json(dir.str("eval/ols.json"));
  CHECK(ols.at("coefficients").contains("interaction"));
  CHECK(ols.at("n_obs").get<std::int64_t>() > 0);

  // Restricted family list.
  CHECK(run({"--out", dir.str("two"), "--seed", "3", "evaluate", "--panel",
             dir.str("synth/panel.csv"), "--families", "popularity,performance", "--scheme",
             "by_day", "--folds", "4"}) == 0);
  const json two = read_json(dir.str("two/error_report.json"));
  CHECK(two.at("families").size() == 2);
  CHECK(two.at("relative_to_social_sampling").empty());

  // Replay determinism for evaluate.
  std::ostringstream out, err;
  CHECK(socsamp::replay_manifest(dir.str("eval/manifest.json"), dir.str("replay"), out, err) ==
        0);
  CHECK(read_file(dir.str("eval/error_report.csv")) ==
        read_file(dir.str("replay/error_report.csv")));
  CHECK(read_file(dir.str("eval/ols.json")) == read_file(dir.str("replay/ols.json")));
}
