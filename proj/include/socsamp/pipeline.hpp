#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socsamp/dates.hpp"
#include "socsamp/models.hpp"
#include "socsamp/panel.hpp"

namespace socsamp {

struct TradeRecord {
  std::int64_t trade_id = 0;
  std::int64_t user_id = 0;
  Day open_date = 0;
  Day close_date = 0;
  std::string asset;
  double amount_invested = 0.0;
  double units = 0.0;
  double leverage = 1.0;
  double open_rate = 0.0;
  double close_rate = 0.0;
  double net_profit = 0.0;
  std::optional<std::int64_t> parent_trade_id;
  std::optional<std::int64_t> mirror_id;
  bool imputed = false;  // in-memory flag; not part of the CSV schema
};

struct ParseDiagnostic {
  std::size_t row = 0;  // 1-based data row number (header excluded)
  std::string message;
};

struct ParseResult {
  std::vector<TradeRecord> records;
  std::vector<ParseDiagnostic> diagnostics;
  // Rows that parsed but violate date ordering (close before open); kept out
  // of records, never silently dropped.
  std::vector<TradeRecord> quarantined;
};

// Trade-log CSV: header required, RFC 4180 quoting, ISO dates, empty string
// for absent optionals. Columns:
//   trade_id,user_id,open_date,close_date,asset,amount_invested,units,
//   leverage,open_rate,close_rate,net_profit,parent_trade_id,mirror_id
// Malformed rows produce row-numbered diagnostics; more than 10% malformed
// aborts with a summary.
ParseResult parse_trades(std::istream& is);
ParseResult parse_trades_file(const std::string& path);
void write_trades_csv(std::ostream& os, const std::vector<TradeRecord>& records);
void write_trades_file(const std::string& path, const std::vector<TradeRecord>& records);

struct MirrorInterval {
  std::int64_t mirror_id = 0;
  std::int64_t mimicker_user = 0;
  std::int64_t target_user = 0;
  Day first_date = 0;
  Day last_date = 0;
};

// Per-user daily mimic bookkeeping reconstructed from mirror intervals.
// A relationship is active from first_date through last_date inclusive; the
// "lost mimicker" decrement lands on last_date + 1.
struct MimicHistory {
  std::vector<MirrorInterval> intervals;  // sorted by mirror_id
  Day first_day = 0;
  Day last_day = 0;

  std::int64_t popularity(std::int64_t user, Day day) const;
  std::int64_t gained(std::int64_t user, Day day) const;
  std::int64_t lost(std::int64_t user, Day day) const;

  std::map<std::int64_t, std::map<Day, std::int64_t>> popularity_by_user;
  std::map<std::int64_t, std::map<Day, std::int64_t>> gained_by_user;
  std::map<std::int64_t, std::map<Day, std::int64_t>> lost_by_user;
};

// Builds mirror intervals (first to last observed open date per mirror id)
// and the per-user daily popularity / new / lost counts. The two users of a
// mirror are the copy's owner and the parent trade's owner; conflicting
// assignments raise IntegrityError naming the mirror id.
MimicHistory reconstruct_popularity(const std::vector<TradeRecord>& records);

enum class MetricKind { roi, sharpe, sortino, sum, average, percent };

const char* metric_name(MetricKind kind);
std::optional<MetricKind> metric_from_name(std::string_view name);

struct PerformanceMetricSpec {
  MetricKind kind = MetricKind::roi;
  int window_days = 30;
  bool closed_trades_only = true;  // false simulates liquidating open trades

  void validate() const;
};

// Per-user-day performance scores. The score for day d covers the trailing
// window [d - window_days, d - 1]; a trade closed on day c therefore counts
// toward days c+1 .. c+window. Undefined user-days (no qualifying trades,
// zero denominators) stay unset rather than zero.
struct PerformanceTable {
  Day first_day = 0;
  Day last_day = 0;
  std::map<std::int64_t, std::vector<std::optional<double>>> scores;  // by user, day-indexed

  std::optional<double> score(std::int64_t user, Day day) const;
};

PerformanceTable compute_performance(const std::vector<TradeRecord>& records,
                                     const PerformanceMetricSpec& spec);

struct ImputationResult {
  std::vector<TradeRecord> records;  // originals untouched + imputed parents, by trade_id
  std::int64_t imputed_count = 0;
  std::vector<std::int64_t> unimputable_parent_ids;
};

// Reconstructs missing parent trades from their observed copies: per mirror,
// the median units ratio copy/parent maps each copy back to a proposed
// parent size; the median proposal wins. Dates, rates, asset and leverage
// come from the copy with the smallest trade id; profit and amount are
// rebuilt from the imputed units and those rates.
ImputationResult impute_missing_parents(const std::vector<TradeRecord>& records);

struct PanelBuildOptions {
  int window_days = 30;   // warm-up; must match the performance window
  bool drop_weekends = true;

  void validate() const;
};

// Assembles the user-day panel: one row per user-day with defined
// performance, previous-trading-day popularity, and the new/lost mimicker
// counts accumulated since the previous trading day (so weekend-boundary
// changes land on Monday). The first window_days of the calendar are
// dropped as warm-up.
PanelDataset build_panel(const MimicHistory& history, const PerformanceTable& performance,
                         const PanelBuildOptions& options);

struct SyntheticMarketConfig {
  std::int64_t n_users = 20;
  std::int64_t n_days = 90;           // calendar days including weekends
  std::int64_t decisions_per_day = 50;
  ModelSpec generator_model = SocialSampling{0.8, 1.0};
  double best_skill = 0.8;            // good-day rate of the single best trader
  double baseline_skill = 0.5;        // everyone else
  double unfollow_rate = 0.0;
  std::uint64_t seed = 0;
  int window_days = 30;
  Day start_day = 15131;              // 2011-06-06, a Monday

  void validate() const;
};

struct SyntheticMarket {
  std::vector<TradeRecord> trades;
  PanelDataset panel;  // ground truth, same schema the ingest path produces
  std::vector<double> skills;  // by user index; user ids are 1000 + index
  std::int64_t best_user = 0;
  std::map<Day, std::int64_t> daily_new_totals;
};

// Emits a full trade log driven by the generator model: every user trades
// each weekday with a skill-signed unit profit, mimic decisions allocate
// mirrors via decision_probabilities over the evolving snapshot, active
// mirrors copy their target's trades, and mirrors unfollow at
// unfollow_rate. Deterministic per seed.
SyntheticMarket generate_synthetic_market(const SyntheticMarketConfig& config);

}  // namespace socsamp
