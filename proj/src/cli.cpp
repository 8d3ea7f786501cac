#include "socsamp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "socsamp/csv.hpp"
#include "socsamp/errors.hpp"
#include "socsamp/evaluation.hpp"
#include "socsamp/inference.hpp"
#include "socsamp/json_io.hpp"
#include "socsamp/manifest.hpp"
#include "socsamp/pipeline.hpp"
#include "socsamp/simulator.hpp"
#include "socsamp/version.hpp"

namespace socsamp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string iso_timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  for (const std::string& item : split_list(csv)) {
    const auto v = parse_double(item);
    if (!v) throw std::invalid_argument(std::string(what) + ": bad number '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& csv, const char* what) {
  std::vector<std::int64_t> out;
  for (const std::string& item : split_list(csv)) {
    const auto v = parse_int(item);
    if (!v) throw std::invalid_argument(std::string(what) + ": bad integer '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

json load_config_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  if (j.value("schema_version", 0) != 1)
    throw std::invalid_argument("config: " + path + ": schema_version must be 1");
  return j;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  return out;
}

std::string fmt(double v) { return format_double(v); }

struct GlobalOptions {
  std::string out_dir = ".";
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool threads_given = false;
};

int resolve_threads(const GlobalOptions& g) {
  if (g.threads_given) return g.threads;
  if (const char* env = std::getenv("SOCIAL_SAMPLER_THREADS")) {
    const auto v = parse_int(env);
    if (v && *v >= 0) return static_cast<int>(*v);
  }
  return 0;
}

// ---------------------------------------------------------------- simulate

SyntheticMarketConfig synth_config_from_json(const json& j) {
  SyntheticMarketConfig cfg;
  cfg.n_users = j.value("n_users", cfg.n_users);
  cfg.n_days = j.value("n_days", cfg.n_days);
  cfg.decisions_per_day = j.value("decisions_per_day", cfg.decisions_per_day);
  if (j.contains("generator_model")) cfg.generator_model = model_from_json(j.at("generator_model"));
  cfg.best_skill = j.value("best_skill", cfg.best_skill);
  cfg.baseline_skill = j.value("baseline_skill", cfg.baseline_skill);
  cfg.unfollow_rate = j.value("unfollow_rate", cfg.unfollow_rate);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.window_days = j.value("window_days", cfg.window_days);
  if (j.contains("start_date")) {
    const auto day = parse_date(j.at("start_date").get<std::string>());
    if (!day) throw std::invalid_argument("config: bad start_date");
    cfg.start_day = *day;
  }
  return cfg;
}

json synth_config_to_json(const SyntheticMarketConfig& cfg) {
  json j;
  j["n_users"] = cfg.n_users;
  j["n_days"] = cfg.n_days;
  j["decisions_per_day"] = cfg.decisions_per_day;
  j["generator_model"] = model_to_json(cfg.generator_model);
  j["best_skill"] = cfg.best_skill;
  j["baseline_skill"] = cfg.baseline_skill;
  j["unfollow_rate"] = cfg.unfollow_rate;
  j["seed"] = cfg.seed;
  j["window_days"] = cfg.window_days;
  j["start_date"] = format_date(cfg.start_day);
  return j;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "cell_index,n_agents,n_options,n_rounds,true_best_rate,assumed_best_rate,gamma,"
        "repetitions,repetitions_used,statistic,value\n";
  for (const SweepRow& row : rows) {
    const std::vector<std::pair<const char*, double>> stats = {
        {"mean", row.mean},
        {"ci_lower", row.ci_lower},
        {"ci_upper", row.ci_upper},
        {"mean_net_of_cost", row.mean_net_of_cost},
    };
    for (const auto& [name, value] : stats) {
      write_csv_row(os, {format_int(static_cast<std::int64_t>(row.cell_index)),
                         format_int(row.config.n_agents), format_int(row.config.n_options),
                         format_int(row.config.n_rounds), fmt(row.config.true_best_rate),
                         fmt(row.config.assumed_best_rate), fmt(row.config.gamma),
                         format_int(row.config.repetitions), format_int(row.repetitions_used),
                         name, fmt(value)});
    }
  }
}

int cmd_simulate(const GlobalOptions& g, Manifest& manifest, std::ostream& out) {
  if (g.config_path.empty()) throw std::invalid_argument("simulate: --config is required");
  const json config = load_config_json(g.config_path);
  if (!config.contains("grid"))
    throw std::invalid_argument("simulate: config is missing the 'grid' object");
  SweepGrid grid = sweep_grid_from_json(config.at("grid"));
  if (g.seed) grid.seed = *g.seed;
  grid.validate();

  const std::vector<SweepRow> rows = run_sweep(grid, resolve_threads(g));

  const fs::path dir(g.out_dir);
  {
    auto csv = open_output(dir / "sweep.csv");
    write_sweep_csv(csv, rows);
  }
  json doc;
  doc["schema_version"] = 1;
  doc["grid"] = sweep_grid_to_json(grid);
  json cells = json::array();
  for (const SweepRow& row : rows) {
    json cell;
    cell["cell_index"] = row.cell_index;
    cell["n_agents"] = row.config.n_agents;
    cell["n_options"] = row.config.n_options;
    cell["n_rounds"] = row.config.n_rounds;
    cell["true_best_rate"] = row.config.true_best_rate;
    cell["assumed_best_rate"] = row.config.assumed_best_rate;
    cell["gamma"] = row.config.gamma;
    cell["mean"] = row.mean;
    cell["ci_lower"] = row.ci_lower;
    cell["ci_upper"] = row.ci_upper;
    cell["mean_net_of_cost"] = row.mean_net_of_cost;
    cell["repetitions_used"] = row.repetitions_used;
    cells.push_back(cell);
  }
  doc["cells"] = cells;
  {
    auto js = open_output(dir / "sweep.json");
    js << doc.dump(2) << '\n';
  }

  manifest.config = json{{"schema_version", 1}, {"grid", sweep_grid_to_json(grid)}};
  manifest.seed = grid.seed;
  manifest.output_files = {"sweep.csv", "sweep.json"};
  manifest.replay_argv = {"simulate"};
  out << "simulate: " << rows.size() << " cells x " << grid.repetitions << " repetitions\n";
  return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitOptions {
  std::string panel_path;
  std::string family = "social_sampling";
  double gamma = 1.0;
  std::string gamma_profile;  // comma list; empty = off
  bool skill_intervals = false;
  std::string trades_path;
  int top = 10;
  double level = 0.95;
};

int cmd_fit(const GlobalOptions& g, const FitOptions& opt, Manifest& manifest,
            std::ostream& out) {
  const auto family = family_from_name(opt.family);
  if (!family) throw std::invalid_argument("fit: unknown family '" + opt.family + "'");
  const PanelDataset panel = read_panel_file(opt.panel_path);
  manifest.input_paths.push_back(opt.panel_path);

  const FitResult result = fit(*family, panel, opt.gamma);

  const fs::path dir(g.out_dir);
  json doc;
  doc["schema_version"] = 1;
  doc["family"] = family_name(*family);
  if (*family == ModelFamily::social_sampling) doc["gamma"] = opt.gamma;
  doc["fit"] = fit_result_to_json(result);
  {
    auto js = open_output(dir / "fit.json");
    js << doc.dump(2) << '\n';
  }
  manifest.output_files = {"fit.json"};

  if (!opt.gamma_profile.empty()) {
    const std::vector<double> grid = parse_double_list(opt.gamma_profile, "fit: --gamma-profile");
    const std::vector<ProfilePoint> profile = gamma_profile(panel, grid);
    auto csv = open_output(dir / "gamma_profile.csv");
    csv << "gamma,log_likelihood,eta,converged\n";
    for (const ProfilePoint& p : profile)
      write_csv_row(csv, {fmt(p.gamma), fmt(p.log_likelihood), fmt(p.eta),
                          p.converged ? "1" : "0"});
    manifest.output_files.push_back("gamma_profile.csv");
  }

  if (opt.skill_intervals) {
    if (opt.trades_path.empty())
      throw std::invalid_argument("fit: --skill-intervals requires --trades");
    const ParseResult parsed = parse_trades_file(opt.trades_path);
    manifest.input_paths.push_back(opt.trades_path);
    std::map<std::int64_t, std::map<Day, double>> daily;
    for (const TradeRecord& t : parsed.records) daily[t.user_id][t.close_date] += t.net_profit;
    std::map<std::int64_t, std::vector<double>> profits;
    for (const auto& [user, by_day] : daily)
      for (const auto& [day, profit] : by_day) profits[user].push_back(profit);
    const std::vector<TraderScore> ranking = rank_traders(profits);

    auto csv = open_output(dir / "skill_intervals.csv");
    csv << "rank,user_id,score,positive_days,negative_days,level,lower,upper\n";
    const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(opt.top),
                                                  ranking.size());
    for (std::size_t i = 0; i < top; ++i) {
      const TraderScore& s = ranking[i];
      const CredibleInterval ci =
          skill_credible_interval(s.positive_days, s.negative_days, opt.level);
      write_csv_row(csv, {format_int(static_cast<std::int64_t>(i + 1)), format_int(s.user_id),
                          format_int(s.score), format_int(s.positive_days),
                          format_int(s.negative_days), fmt(ci.level), fmt(ci.lower),
                          fmt(ci.upper)});
    }
    manifest.output_files.push_back("skill_intervals.csv");
  }

  json cfg;
  cfg["panel"] = fs::absolute(opt.panel_path).string();
  cfg["family"] = family_name(*family);
  cfg["gamma"] = opt.gamma;
  cfg["gamma_profile"] = opt.gamma_profile;
  cfg["skill_intervals"] = opt.skill_intervals;
  if (!opt.trades_path.empty()) cfg["trades"] = fs::absolute(opt.trades_path).string();
  cfg["top"] = opt.top;
  cfg["level"] = opt.level;
  manifest.config = cfg;

  manifest.replay_argv = {"fit", "--panel", fs::absolute(opt.panel_path).string(),
                          "--family", family_name(*family), "--gamma", fmt(opt.gamma)};
  if (!opt.gamma_profile.empty()) {
    manifest.replay_argv.push_back("--gamma-profile");
    manifest.replay_argv.push_back(opt.gamma_profile);
  }
  if (opt.skill_intervals) {
    manifest.replay_argv.push_back("--skill-intervals");
    manifest.replay_argv.push_back("--trades");
    manifest.replay_argv.push_back(fs::absolute(opt.trades_path).string());
    manifest.replay_argv.push_back("--top");
    manifest.replay_argv.push_back(format_int(opt.top));
    manifest.replay_argv.push_back("--level");
    manifest.replay_argv.push_back(fmt(opt.level));
  }

  out << "fit: " << family_name(*family) << " log-likelihood " << result.log_likelihood
      << (result.converged ? "" : " (not converged)") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string panel_path;
  std::string families;  // comma list; empty = all
  std::string scheme = "by_user";
  double fraction = 0.10;
  int folds = 10;
  std::string pop_bins;
  std::string perf_bins;
};

std::string pop_bin_label(const std::vector<std::int64_t>& upper, std::size_t bin) {
  if (bin == upper.size()) return ">" + format_int(upper.back());
  const std::int64_t lo = bin == 0 ? 0 : upper[bin - 1] + 1;
  const std::int64_t hi = upper[bin];
  if (lo >= hi) return format_int(hi);
  return format_int(lo) + "-" + format_int(hi);
}

std::string perf_bin_label(const std::vector<double>& upper, std::size_t bin) {
  if (bin == 0) return "<=" + fmt(upper.front());
  if (bin == upper.size()) return ">" + fmt(upper.back());
  return "(" + fmt(upper[bin - 1]) + "," + fmt(upper[bin]) + "]";
}

void write_binned_csv(std::ostream& os, const BinnedSummary& summary) {
  os << "pop_bin,perf_bin,n,mean_observed,ci_lo,ci_hi,mean_predicted\n";
  for (std::size_t p = 0; p < summary.pop_bins(); ++p)
    for (std::size_t q = 0; q < summary.perf_bins(); ++q) {
      const BinnedSummary::Cell& cell = summary.at(p, q);
      write_csv_row(os, {pop_bin_label(summary.pop_upper, p),
                         perf_bin_label(summary.perf_upper, q), format_int(cell.n),
                         fmt(cell.mean_observed), fmt(cell.ci_lower), fmt(cell.ci_upper),
                         fmt(cell.mean_predicted)});
    }
}

int cmd_evaluate(const GlobalOptions& g, const EvaluateOptions& opt, Manifest& manifest,
                 std::ostream& out) {
  const PanelDataset panel = read_panel_file(opt.panel_path);
  manifest.input_paths.push_back(opt.panel_path);

  std::vector<ModelFamily> families;
  if (opt.families.empty()) {
    families = all_families();
  } else {
    for (const std::string& name : split_list(opt.families)) {
      const auto f = family_from_name(name);
      if (!f) throw std::invalid_argument("evaluate: unknown family '" + name + "'");
      families.push_back(*f);
    }
  }

  CVScheme scheme;
  const auto kind = cv_kind_from_name(opt.scheme);
  if (!kind) throw std::invalid_argument("evaluate: unknown scheme '" + opt.scheme + "'");
  scheme.kind = *kind;
  scheme.fraction = opt.fraction;
  scheme.folds = opt.folds;
  scheme.seed = g.seed.value_or(0);

  const std::vector<std::int64_t> pop_upper =
      opt.pop_bins.empty() ? kDefaultPopularityBinUpper
                           : parse_int_list(opt.pop_bins, "evaluate: --pop-bins");
  const std::vector<double> perf_upper =
      opt.perf_bins.empty() ? kDefaultPerformanceBinUpper
                            : parse_double_list(opt.perf_bins, "evaluate: --perf-bins");

  const int threads = resolve_threads(g);
  const ErrorReport report = cross_validate(families, panel, scheme, threads);

  const fs::path dir(g.out_dir);
  {
    auto csv = open_output(dir / "error_report.csv");
    csv << "scheme,family,metric,value\n";
    for (const auto& row : report.families) {
      write_csv_row(csv, {opt.scheme, family_name(row.family), "mae", fmt(row.mae)});
      write_csv_row(csv, {opt.scheme, family_name(row.family), "mse", fmt(row.mse)});
      write_csv_row(csv, {opt.scheme, family_name(row.family), "f_score", fmt(row.f_score)});
    }
    for (const auto& rel : report.relative_to_social_sampling)
      write_csv_row(csv, {opt.scheme, family_name(rel.family),
                          "relative_error_vs_social_sampling", fmt(rel.value)});
  }
  {
    json doc;
    doc["schema_version"] = 1;
    doc["scheme"] = {{"kind", opt.scheme},
                     {"fraction", scheme.fraction},
                     {"folds", scheme.folds},
                     {"seed", scheme.seed}};
    json fam = json::array();
    for (const auto& row : report.families)
      fam.push_back({{"family", family_name(row.family)},
                     {"mae", row.mae},
                     {"mse", row.mse},
                     {"f_score", row.f_score},
                     {"rows", row.rows}});
    doc["families"] = fam;
    json rel = json::array();
    for (const auto& r : report.relative_to_social_sampling)
      rel.push_back({{"family", family_name(r.family)}, {"value", r.value}});
    doc["relative_to_social_sampling"] = rel;
    doc["skipped_folds"] = report.skipped_folds;
    auto js = open_output(dir / "error_report.json");
    js << doc.dump(2) << '\n';
  }
  manifest.output_files = {"error_report.csv", "error_report.json"};

  // Binned interaction summaries: observed alone, then per family with
  // in-sample predictions (fit on the full panel, expectations given each
  // day's actual total), mirroring the replication layout.
  {
    const BinnedSummary observed =
        binned_interaction_summary(panel, std::nullopt, pop_upper, perf_upper);
    auto csv = open_output(dir / "binned_observed.csv");
    write_binned_csv(csv, observed);
    manifest.output_files.push_back("binned_observed.csv");
  }
  for (ModelFamily family : families) {
    const FitResult fitted = fit(family, panel);
    std::vector<std::vector<double>> predictions;
    predictions.reserve(panel.days.size());
    for (const PanelDay& day : panel.days)
      predictions.push_back(
          expected_new_mimickers(fitted.model, day.snapshot(), day.total_new()));
    const BinnedSummary summary =
        binned_interaction_summary(panel, predictions, pop_upper, perf_upper);
    const std::string file = "binned_" + family_name(family) + ".csv";
    auto csv = open_output(dir / file);
    write_binned_csv(csv, summary);
    manifest.output_files.push_back(file);
  }

  {
    const RegressionResult ols = ols_interaction_regression(panel);
    json doc;
    doc["schema_version"] = 1;
    doc["n_obs"] = ols.n_obs;
    doc["coefficients"] = {{"intercept", ols.coefficients[0]},
                           {"popularity", ols.coefficients[1]},
                           {"performance", ols.coefficients[2]},
                           {"interaction", ols.coefficients[3]}};
    doc["p_values"] = {{"intercept", ols.p_values[0]},
                       {"popularity", ols.p_values[1]},
                       {"performance", ols.p_values[2]},
                       {"interaction", ols.p_values[3]}};
    auto js = open_output(dir / "ols.json");
    js << doc.dump(2) << '\n';
    manifest.output_files.push_back("ols.json");
  }

  json cfg;
  cfg["panel"] = fs::absolute(opt.panel_path).string();
  cfg["families"] = opt.families;
  cfg["scheme"] = opt.scheme;
  cfg["fraction"] = opt.fraction;
  cfg["folds"] = opt.folds;
  cfg["seed"] = scheme.seed;
  cfg["pop_bins"] = opt.pop_bins;
  cfg["perf_bins"] = opt.perf_bins;
  manifest.config = cfg;
  manifest.seed = scheme.seed;

  manifest.replay_argv = {"evaluate", "--panel", fs::absolute(opt.panel_path).string(),
                          "--scheme", opt.scheme,
                          "--fraction", fmt(opt.fraction),
                          "--folds", format_int(opt.folds),
                          "--seed", format_int(static_cast<std::int64_t>(scheme.seed))};
  if (!opt.families.empty()) {
    manifest.replay_argv.push_back("--families");
    manifest.replay_argv.push_back(opt.families);
  }
  if (!opt.pop_bins.empty()) {
    manifest.replay_argv.push_back("--pop-bins");
    manifest.replay_argv.push_back(opt.pop_bins);
  }
  if (!opt.perf_bins.empty()) {
    manifest.replay_argv.push_back("--perf-bins");
    manifest.replay_argv.push_back(opt.perf_bins);
  }

  out << "evaluate: " << report.families.size() << " families, scheme " << opt.scheme << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ synth/ingest

int cmd_synth(const GlobalOptions& g, Manifest& manifest, std::ostream& out) {
  if (g.config_path.empty()) throw std::invalid_argument("synth: --config is required");
  const json config = load_config_json(g.config_path);
  if (!config.contains("market"))
    throw std::invalid_argument("synth: config is missing the 'market' object");
  SyntheticMarketConfig cfg = synth_config_from_json(config.at("market"));
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();

  const SyntheticMarket market = generate_synthetic_market(cfg);

  const fs::path dir(g.out_dir);
  write_trades_file((dir / "trades.csv").string(), market.trades);
  write_panel_file((dir / "panel.csv").string(), market.panel);
  {
    json truth;
    truth["schema_version"] = 1;
    truth["config"] = synth_config_to_json(cfg);
    json skills;
    for (std::size_t i = 0; i < market.skills.size(); ++i)
      skills[format_int(1000 + static_cast<std::int64_t>(i))] = market.skills[i];
    truth["skills"] = skills;
    truth["best_user"] = market.best_user;
    json totals;
    for (const auto& [day, total] : market.daily_new_totals)
      totals[format_date(day)] = total;
    truth["daily_new_totals"] = totals;
    auto js = open_output(dir / "ground_truth.json");
    js << truth.dump(2) << '\n';
  }

  manifest.config = json{{"schema_version", 1}, {"market", synth_config_to_json(cfg)}};
  manifest.seed = cfg.seed;
  manifest.output_files = {"trades.csv", "panel.csv", "ground_truth.json"};
  manifest.replay_argv = {"synth"};
  out << "synth: " << market.trades.size() << " trades, " << market.panel.days.size()
      << " panel days\n";
  return kExitOk;
}

struct IngestOptions {
  std::string trades_path;
  bool impute = false;
  std::string metric = "roi";
  int window = 30;
  bool include_open = false;
};

int cmd_ingest(const GlobalOptions& g, const IngestOptions& opt, Manifest& manifest,
               std::ostream& out) {
  const auto kind = metric_from_name(opt.metric);
  if (!kind) throw std::invalid_argument("ingest: unknown metric '" + opt.metric + "'");

  ParseResult parsed = parse_trades_file(opt.trades_path);
  manifest.input_paths.push_back(opt.trades_path);

  std::int64_t imputed = 0;
  std::int64_t unimputable = 0;
  std::vector<TradeRecord> records = std::move(parsed.records);
  if (opt.impute) {
    ImputationResult imputation = impute_missing_parents(records);
    records = std::move(imputation.records);
    imputed = imputation.imputed_count;
    unimputable = static_cast<std::int64_t>(imputation.unimputable_parent_ids.size());
  }

  const MimicHistory history = reconstruct_popularity(records);
  PerformanceMetricSpec spec;
  spec.kind = *kind;
  spec.window_days = opt.window;
  spec.closed_trades_only = !opt.include_open;
  const PerformanceTable performance = compute_performance(records, spec);

  PanelBuildOptions build;
  build.window_days = opt.window;
  const PanelDataset panel = build_panel(history, performance, build);

  const fs::path dir(g.out_dir);
  write_panel_file((dir / "panel.csv").string(), panel);
  manifest.output_files = {"panel.csv"};

  manifest.extra = json{{"parsed_rows", records.size()},
                        {"malformed_rows", parsed.diagnostics.size() - parsed.quarantined.size()},
                        {"quarantined_rows", parsed.quarantined.size()},
                        {"diagnostic_count", parsed.diagnostics.size()},
                        {"imputed_parents", imputed},
                        {"unimputable_parents", unimputable},
                        {"panel_rows", panel.row_count()}};

  json cfg;
  cfg["trades"] = fs::absolute(opt.trades_path).string();
  cfg["impute"] = opt.impute;
  cfg["metric"] = opt.metric;
  cfg["window"] = opt.window;
  cfg["include_open"] = opt.include_open;
  manifest.config = cfg;

  manifest.replay_argv = {"ingest", "--trades", fs::absolute(opt.trades_path).string(),
                          "--metric", opt.metric, "--window", format_int(opt.window)};
  if (opt.impute) manifest.replay_argv.push_back("--impute");
  if (opt.include_open) manifest.replay_argv.push_back("--include-open");

  out << "ingest: " << records.size() << " trades -> " << panel.row_count() << " panel rows";
  if (!parsed.diagnostics.empty()) out << " (" << parsed.diagnostics.size() << " diagnostics)";
  out << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"social decision-making toolkit: simulation, fitting, evaluation, trade-log "
               "ingestion",
               "social_sampler"};

  GlobalOptions g;
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--config", g.config_path, "JSON config file (simulate, synth)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed override");
  auto* threads_opt =
      app.add_option("--threads", g.threads,
                     "Worker threads (0 = auto; SOCIAL_SAMPLER_THREADS as fallback)");
  app.require_subcommand(1);
  // Global flags may appear after the subcommand, as in recorded replay argv.
  app.fallthrough();

  CLI::App* simulate = app.add_subcommand("simulate", "Run idealized agent simulations/sweeps");
  simulate->fallthrough();
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a choice model to a panel");
  fit_cmd->fallthrough();
  FitOptions fit_opt;
  fit_cmd->add_option("--panel", fit_opt.panel_path, "Panel CSV")->required();
  fit_cmd->add_option("--family", fit_opt.family, "Model family")->capture_default_str();
  fit_cmd->add_option("--gamma", fit_opt.gamma, "Popularity exponent (social sampling)")
      ->capture_default_str();
  fit_cmd->add_option("--gamma-profile", fit_opt.gamma_profile,
                      "Comma list of gamma values for a profile-likelihood sweep");
  fit_cmd->add_flag("--skill-intervals", fit_opt.skill_intervals,
                    "Emit top-trader skill credible intervals (needs --trades)");
  fit_cmd->add_option("--trades", fit_opt.trades_path, "Trade-log CSV for --skill-intervals");
  fit_cmd->add_option("--top", fit_opt.top, "Number of top traders")->capture_default_str();
  fit_cmd->add_option("--level", fit_opt.level, "Credible level")->capture_default_str();

  CLI::App* evaluate = app.add_subcommand("evaluate", "Cross-validated model comparison");
  evaluate->fallthrough();
  EvaluateOptions eval_opt;
  evaluate->add_option("--panel", eval_opt.panel_path, "Panel CSV")->required();
  evaluate->add_option("--families", eval_opt.families, "Comma list (default: all six)");
  evaluate->add_option("--scheme", eval_opt.scheme, "by_user | by_day | temporal")
      ->capture_default_str();
  evaluate->add_option("--fraction", eval_opt.fraction, "Temporal holdout fraction")
      ->capture_default_str();
  evaluate->add_option("--folds", eval_opt.folds, "Fold count")->capture_default_str();
  evaluate->add_option("--pop-bins", eval_opt.pop_bins,
                       "Popularity bin upper bounds (default 0,10,100)");
  evaluate->add_option("--perf-bins", eval_opt.perf_bins,
                       "Performance bin upper bounds (default 0)");

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic trade log");
  synth->fallthrough();
  CLI::App* ingest = app.add_subcommand("ingest", "Build a panel from a trade log");
  ingest->fallthrough();
  IngestOptions ingest_opt;
  ingest->add_option("--trades", ingest_opt.trades_path, "Trade-log CSV")->required();
  ingest->add_flag("--impute", ingest_opt.impute, "Impute missing parent trades first");
  ingest->add_option("--metric", ingest_opt.metric,
                     "roi | sharpe | sortino | sum | average | percent")
      ->capture_default_str();
  ingest->add_option("--window", ingest_opt.window, "Rolling window in days")
      ->capture_default_str();
  ingest->add_flag("--include-open", ingest_opt.include_open,
                   "Mark open trades to last observed rates (liquidation variant)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;
  g.threads_given = threads_opt->count() > 0;

  Manifest manifest;
  manifest.started_at = iso_timestamp_utc();
  manifest.threads = resolve_threads(g);
  if (g.seed) manifest.seed = *g.seed;
  const auto t0 = std::chrono::steady_clock::now();

  try {
    std::error_code ec;
    std::filesystem::create_directories(g.out_dir, ec);
    if (ec) throw std::invalid_argument("cannot create output directory " + g.out_dir);
    if (!g.config_path.empty())
      manifest.input_paths.push_back(std::filesystem::absolute(g.config_path).string());

    int code = kExitOk;
    if (simulate->parsed()) {
      manifest.command = "simulate";
      code = cmd_simulate(g, manifest, out);
    } else if (fit_cmd->parsed()) {
      manifest.command = "fit";
      code = cmd_fit(g, fit_opt, manifest, out);
    } else if (evaluate->parsed()) {
      manifest.command = "evaluate";
      code = cmd_evaluate(g, eval_opt, manifest, out);
    } else if (synth->parsed()) {
      manifest.command = "synth";
      code = cmd_synth(g, manifest, out);
    } else if (ingest->parsed()) {
      manifest.command = "ingest";
      code = cmd_ingest(g, ingest_opt, manifest, out);
    }
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest((std::filesystem::path(g.out_dir) / "manifest.json").string(), manifest);
    return code;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitCapExceeded;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const IntegrityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericFailure;
  }
}

int replay_manifest(const std::string& manifest_path, const std::string& out_dir,
                    std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) {
    err << "error: cannot open manifest " << manifest_path << '\n';
    return kExitInputError;
  }
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    err << "error: manifest parse: " << e.what() << '\n';
    return kExitInputError;
  }
  std::vector<std::string> argv;
  argv.push_back("--out");
  argv.push_back(out_dir);
  const std::string command = m.at("command").get<std::string>();
  if (command == "simulate" || command == "synth") {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const std::string cfg_path =
        (std::filesystem::path(out_dir) / "replay_config.json").string();
    std::ofstream cfg(cfg_path, std::ios::binary);
    cfg << m.at("config").dump(2) << '\n';
    cfg.close();
    argv.push_back("--config");
    argv.push_back(cfg_path);
  }
  const auto recorded = m.at("replay_argv").get<std::vector<std::string>>();
  argv.insert(argv.end(), recorded.begin(), recorded.end());
  return run_command(argv, out, err);
}

}  // namespace socsamp
