#include "socsamp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "socsamp/csv.hpp"
#include "socsamp/errors.hpp"
#include "socsamp/rng.hpp"
#include "socsamp/stats.hpp"

namespace socsamp {

namespace {

const char* kTradeHeader =
    "trade_id,user_id,open_date,close_date,asset,amount_invested,units,leverage,"
    "open_rate,close_rate,net_profit,parent_trade_id,mirror_id";

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string opt_to_field(const std::optional<std::int64_t>& v) {
  return v ? format_int(*v) : std::string();
}

}  // namespace

ParseResult parse_trades(std::istream& is) {
  ParseResult result;
  auto header = read_csv_record(is);
  if (!header) throw std::invalid_argument("trade csv: empty input (header required)");
  {
    std::ostringstream joined;
    for (std::size_t i = 0; i < header->size(); ++i) {
      if (i) joined << ',';
      joined << (*header)[i];
    }
    if (joined.str() != kTradeHeader)
      throw std::invalid_argument("trade csv: unexpected header '" + joined.str() + "'");
  }

  std::size_t row = 0;
  std::size_t malformed = 0;
  while (auto rec = read_csv_record(is)) {
    if (rec->size() == 1 && (*rec)[0].empty()) continue;
    ++row;
    auto reject = [&](const std::string& why) {
      ++malformed;
      result.diagnostics.push_back({row, why});
    };
    if (rec->size() != 13) {
      reject("expected 13 columns, got " + std::to_string(rec->size()));
      continue;
    }
    TradeRecord t;
    const auto id = parse_int((*rec)[0]);
    const auto user = parse_int((*rec)[1]);
    const auto open = parse_date((*rec)[2]);
    const auto close = parse_date((*rec)[3]);
    const auto amount = parse_double((*rec)[5]);
    const auto units = parse_double((*rec)[6]);
    const auto leverage = parse_double((*rec)[7]);
    const auto open_rate = parse_double((*rec)[8]);
    const auto close_rate = parse_double((*rec)[9]);
    const auto profit = parse_double((*rec)[10]);
    if (!id || !user || !open || !close || !amount || !units || !leverage || !open_rate ||
        !close_rate || !profit) {
      reject("malformed field");
      continue;
    }
    t.trade_id = *id;
    t.user_id = *user;
    t.open_date = *open;
    t.close_date = *close;
    t.asset = (*rec)[4];
    t.amount_invested = *amount;
    t.units = *units;
    t.leverage = *leverage;
    t.open_rate = *open_rate;
    t.close_rate = *close_rate;
    t.net_profit = *profit;
    if (!(*rec)[11].empty()) {
      const auto parent = parse_int((*rec)[11]);
      if (!parent) {
        reject("malformed parent_trade_id");
        continue;
      }
      t.parent_trade_id = *parent;
    }
    if (!(*rec)[12].empty()) {
      const auto mirror = parse_int((*rec)[12]);
      if (!mirror) {
        reject("malformed mirror_id");
        continue;
      }
      t.mirror_id = *mirror;
    }
    if (t.mirror_id && !t.parent_trade_id) {
      reject("mirror_id present without parent_trade_id");
      continue;
    }
    if (t.close_date < t.open_date) {
      result.diagnostics.push_back({row, "close date precedes open date; record quarantined"});
      result.quarantined.push_back(std::move(t));
      continue;
    }
    result.records.push_back(std::move(t));
  }

  if (row > 0 && 10 * malformed > row)
    throw std::invalid_argument("trade csv: " + std::to_string(malformed) + " of " +
                                std::to_string(row) +
                                " rows malformed (>10%); aborting parse");
  return result;
}

ParseResult parse_trades_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("trade csv: cannot open " + path);
  return parse_trades(in);
}

void write_trades_csv(std::ostream& os, const std::vector<TradeRecord>& records) {
  os << kTradeHeader << '\n';
  for (const TradeRecord& t : records) {
    write_csv_row(os, {format_int(t.trade_id), format_int(t.user_id), format_date(t.open_date),
                       format_date(t.close_date), t.asset, format_double(t.amount_invested),
                       format_double(t.units), format_double(t.leverage),
                       format_double(t.open_rate), format_double(t.close_rate),
                       format_double(t.net_profit), opt_to_field(t.parent_trade_id),
                       opt_to_field(t.mirror_id)});
  }
}

void write_trades_file(const std::string& path, const std::vector<TradeRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("trade csv: cannot write " + path);
  write_trades_csv(out, records);
}

namespace {

std::int64_t lookup(const std::map<std::int64_t, std::map<Day, std::int64_t>>& table,
                    std::int64_t user, Day day) {
  const auto user_it = table.find(user);
  if (user_it == table.end()) return 0;
  const auto day_it = user_it->second.find(day);
  return day_it == user_it->second.end() ? 0 : day_it->second;
}

}  // namespace

std::int64_t MimicHistory::popularity(std::int64_t user, Day day) const {
  return lookup(popularity_by_user, user, day);
}
std::int64_t MimicHistory::gained(std::int64_t user, Day day) const {
  return lookup(gained_by_user, user, day);
}
std::int64_t MimicHistory::lost(std::int64_t user, Day day) const {
  return lookup(lost_by_user, user, day);
}

MimicHistory reconstruct_popularity(const std::vector<TradeRecord>& records) {
  if (records.empty()) throw std::invalid_argument("reconstruct_popularity: no trades");

  std::map<std::int64_t, const TradeRecord*> by_id;
  for (const TradeRecord& t : records) by_id[t.trade_id] = &t;

  struct MirrorAccumulator {
    std::optional<std::int64_t> mimicker;
    std::optional<std::int64_t> target;
    Day first = 0;
    Day last = 0;
    bool seen = false;
  };
  std::map<std::int64_t, MirrorAccumulator> mirrors;

  MimicHistory history;
  history.first_day = records.front().open_date;
  history.last_day = records.front().close_date;
  for (const TradeRecord& t : records) {
    history.first_day = std::min(history.first_day, t.open_date);
    history.last_day = std::max(history.last_day, t.close_date);
    if (!t.mirror_id) continue;
    MirrorAccumulator& acc = mirrors[*t.mirror_id];
    if (!acc.seen) {
      acc.first = acc.last = t.open_date;
      acc.seen = true;
    } else {
      acc.first = std::min(acc.first, t.open_date);
      acc.last = std::max(acc.last, t.open_date);
    }
    if (acc.mimicker && *acc.mimicker != t.user_id)
      throw IntegrityError("mirror " + std::to_string(*t.mirror_id) +
                           ": conflicting mimicking users");
    acc.mimicker = t.user_id;
    const auto parent_it = t.parent_trade_id ? by_id.find(*t.parent_trade_id) : by_id.end();
    if (parent_it != by_id.end()) {
      const std::int64_t target = parent_it->second->user_id;
      if (acc.target && *acc.target != target)
        throw IntegrityError("mirror " + std::to_string(*t.mirror_id) +
                             ": conflicting target users");
      acc.target = target;
    }
  }

  for (const auto& [mirror_id, acc] : mirrors) {
    if (!acc.target)
      throw IntegrityError("mirror " + std::to_string(mirror_id) +
                           ": no copy resolves a parent trade, target unknown");
    MirrorInterval interval;
    interval.mirror_id = mirror_id;
    interval.mimicker_user = *acc.mimicker;
    interval.target_user = *acc.target;
    interval.first_date = acc.first;
    interval.last_date = acc.last;
    history.intervals.push_back(interval);

    history.gained_by_user[interval.target_user][interval.first_date] += 1;
    history.lost_by_user[interval.target_user][interval.last_date + 1] += 1;
  }

  // Popularity per day via interval-boundary sweeps, one user at a time.
  std::map<std::int64_t, std::map<Day, std::int64_t>> deltas;
  for (const MirrorInterval& iv : history.intervals) {
    deltas[iv.target_user][iv.first_date] += 1;
    deltas[iv.target_user][iv.last_date + 1] -= 1;
  }
  for (const auto& [user, day_deltas] : deltas) {
    std::int64_t running = 0;
    auto it = day_deltas.begin();
    for (Day d = history.first_day; d <= history.last_day; ++d) {
      while (it != day_deltas.end() && it->first <= d) {
        running += it->second;
        ++it;
      }
      if (running != 0) history.popularity_by_user[user][d] = running;
    }
  }
  return history;
}

const char* metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::roi: return "roi";
    case MetricKind::sharpe: return "sharpe";
    case MetricKind::sortino: return "sortino";
    case MetricKind::sum: return "sum";
    case MetricKind::average: return "average";
    case MetricKind::percent: return "percent";
  }
  return "unknown";
}

std::optional<MetricKind> metric_from_name(std::string_view name) {
  for (MetricKind k : {MetricKind::roi, MetricKind::sharpe, MetricKind::sortino, MetricKind::sum,
                       MetricKind::average, MetricKind::percent})
    if (metric_name(k) == name) return k;
  return std::nullopt;
}

void PerformanceMetricSpec::validate() const {
  if (window_days < 1)
    throw std::invalid_argument("performance metric: window_days must be >= 1");
}

std::optional<double> PerformanceTable::score(std::int64_t user, Day day) const {
  const auto it = scores.find(user);
  if (it == scores.end()) return std::nullopt;
  if (day < first_day || day > last_day) return std::nullopt;
  return it->second[static_cast<std::size_t>(day - first_day)];
}

namespace {

// One closed (or marked-to-day) trade inside a scoring window.
struct WindowTrade {
  Day settle_day = 0;  // close date, or the mark day for open positions
  double roi = 0.0;
  bool roi_valid = false;  // amount > 0
  double profit = 0.0;
  double amount = 0.0;
};

std::optional<double> metric_over_window(const std::vector<WindowTrade>& trades,
                                         std::size_t begin, std::size_t end, MetricKind kind) {
  if (begin >= end) return std::nullopt;
  switch (kind) {
    case MetricKind::roi: {
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i = begin; i < end; ++i) {
        if (!trades[i].roi_valid) continue;
        sum += trades[i].roi;
        ++n;
      }
      if (n == 0) return std::nullopt;
      return sum / static_cast<double>(n);
    }
    case MetricKind::sharpe:
    case MetricKind::sortino: {
      std::vector<double> rois;
      for (std::size_t i = begin; i < end; ++i)
        if (trades[i].roi_valid) rois.push_back(trades[i].roi);
      if (rois.empty()) return std::nullopt;
      const double m = mean_of(rois);
      std::vector<double> pool;
      if (kind == MetricKind::sharpe) {
        pool = rois;
      } else {
        for (double r : rois)
          if (r < 0.0) pool.push_back(r);
      }
      const double sd = sample_sd(pool);
      if (!std::isfinite(sd) || sd == 0.0) return std::nullopt;
      return m / sd;
    }
    case MetricKind::sum: {
      double total = 0.0;
      for (std::size_t i = begin; i < end; ++i) total += trades[i].profit;
      return total;
    }
    case MetricKind::average: {
      double profit = 0.0, amount = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        profit += trades[i].profit;
        amount += trades[i].amount;
      }
      if (!(amount > 0.0)) return std::nullopt;
      return profit / amount;
    }
    case MetricKind::percent: {
      std::size_t positive = 0;
      for (std::size_t i = begin; i < end; ++i) positive += trades[i].profit > 0.0;
      return static_cast<double>(positive) / static_cast<double>(end - begin) - 0.5;
    }
  }
  return std::nullopt;
}

WindowTrade settled_trade(const TradeRecord& t) {
  WindowTrade w;
  w.settle_day = t.close_date;
  w.profit = t.net_profit;
  w.amount = t.amount_invested;
  if (t.amount_invested > 0.0) {
    w.roi = t.net_profit / t.amount_invested;
    w.roi_valid = true;
  }
  return w;
}

}  // namespace

PerformanceTable compute_performance(const std::vector<TradeRecord>& records,
                                     const PerformanceMetricSpec& spec) {
  spec.validate();
  if (records.empty()) throw std::invalid_argument("compute_performance: no trades");

  PerformanceTable table;
  table.first_day = records.front().open_date;
  table.last_day = records.front().close_date;
  for (const TradeRecord& t : records) {
    table.first_day = std::min(table.first_day, t.open_date);
    table.last_day = std::max(table.last_day, t.close_date);
  }
  const std::size_t n_days = static_cast<std::size_t>(table.last_day - table.first_day + 1);

  // Last observed rate per asset per day, for marking open positions.
  std::map<std::string, std::map<Day, double>> rate_table;
  if (!spec.closed_trades_only) {
    std::vector<const TradeRecord*> ordered;
    ordered.reserve(records.size());
    for (const TradeRecord& t : records) ordered.push_back(&t);
    std::sort(ordered.begin(), ordered.end(),
              [](const TradeRecord* a, const TradeRecord* b) { return a->trade_id < b->trade_id; });
    for (const TradeRecord* t : ordered) {
      rate_table[t->asset][t->open_date] = t->open_rate;
      rate_table[t->asset][t->close_date] = t->close_rate;
    }
  }
  auto mark_rate = [&](const std::string& asset, Day day) -> std::optional<double> {
    const auto asset_it = rate_table.find(asset);
    if (asset_it == rate_table.end()) return std::nullopt;
    auto it = asset_it->second.upper_bound(day);
    if (it == asset_it->second.begin()) return std::nullopt;
    return std::prev(it)->second;
  };

  // Group per user, ordered by (close_date, trade_id) so every caller that
  // reproduces this ordering gets bit-identical sums.
  std::map<std::int64_t, std::vector<const TradeRecord*>> by_user;
  for (const TradeRecord& t : records) by_user[t.user_id].push_back(&t);

  for (auto& [user, trades] : by_user) {
    std::sort(trades.begin(), trades.end(), [](const TradeRecord* a, const TradeRecord* b) {
      if (a->close_date != b->close_date) return a->close_date < b->close_date;
      return a->trade_id < b->trade_id;
    });
    std::vector<WindowTrade> closed;
    closed.reserve(trades.size());
    for (const TradeRecord* t : trades) closed.push_back(settled_trade(*t));

    std::vector<std::optional<double>>& out =
        table.scores.emplace(user, std::vector<std::optional<double>>(n_days)).first->second;

    std::size_t lo = 0, hi = 0;
    for (Day day = table.first_day; day <= table.last_day; ++day) {
      const Day window_begin = day - spec.window_days;
      const Day window_end = day - 1;
      while (lo < closed.size() && closed[lo].settle_day < window_begin) ++lo;
      while (hi < closed.size() && closed[hi].settle_day <= window_end) ++hi;

      if (spec.closed_trades_only) {
        out[static_cast<std::size_t>(day - table.first_day)] =
            metric_over_window(closed, lo, hi, spec.kind);
        continue;
      }
      // Liquidation variant: also mark positions opened in the window and
      // still open at the window's end to the last observed rate.
      std::vector<WindowTrade> window(closed.begin() + lo, closed.begin() + hi);
      for (const TradeRecord* t : trades) {
        if (t->open_date < window_begin || t->open_date > window_end) continue;
        if (t->close_date <= window_end) continue;  // already settled inside the window
        WindowTrade w;
        w.settle_day = window_end;
        const double mark = mark_rate(t->asset, window_end).value_or(t->open_rate);
        w.profit = t->units * (mark - t->open_rate);
        w.amount = t->amount_invested;
        if (w.amount > 0.0) {
          w.roi = w.profit / w.amount;
          w.roi_valid = true;
        }
        window.push_back(w);
      }
      out[static_cast<std::size_t>(day - table.first_day)] =
          metric_over_window(window, 0, window.size(), spec.kind);
    }
  }
  return table;
}

ImputationResult impute_missing_parents(const std::vector<TradeRecord>& records) {
  ImputationResult result;
  result.records = records;

  std::map<std::int64_t, const TradeRecord*> by_id;
  for (const TradeRecord& t : records) by_id[t.trade_id] = &t;

  // Median copy/parent units ratio and resolved target user per mirror.
  std::map<std::int64_t, std::vector<double>> ratio_samples;
  std::map<std::int64_t, std::int64_t> mirror_target;
  for (const TradeRecord& t : records) {
    if (!t.mirror_id || !t.parent_trade_id) continue;
    const auto parent_it = by_id.find(*t.parent_trade_id);
    if (parent_it == by_id.end()) continue;
    const TradeRecord& parent = *parent_it->second;
    if (parent.units != 0.0)
      ratio_samples[*t.mirror_id].push_back(t.units / parent.units);
    mirror_target.emplace(*t.mirror_id, parent.user_id);
  }
  std::map<std::int64_t, double> mirror_ratio;
  for (const auto& [mirror, samples] : ratio_samples) {
    const double r = median_of(samples);
    if (r != 0.0) mirror_ratio[mirror] = r;
  }

  // Copies pointing at parents that are absent from the log.
  std::map<std::int64_t, std::vector<const TradeRecord*>> missing;
  for (const TradeRecord& t : records) {
    if (!t.parent_trade_id || by_id.count(*t.parent_trade_id)) continue;
    missing[*t.parent_trade_id].push_back(&t);
  }

  for (const auto& [parent_id, copies] : missing) {
    std::vector<double> proposals;
    for (const TradeRecord* copy : copies) {
      if (!copy->mirror_id) continue;
      const auto ratio_it = mirror_ratio.find(*copy->mirror_id);
      if (ratio_it == mirror_ratio.end()) continue;
      proposals.push_back(copy->units / ratio_it->second);
    }
    const TradeRecord* tmpl = *std::min_element(
        copies.begin(), copies.end(),
        [](const TradeRecord* a, const TradeRecord* b) { return a->trade_id < b->trade_id; });
    std::optional<std::int64_t> target;
    if (tmpl->mirror_id) {
      const auto it = mirror_target.find(*tmpl->mirror_id);
      if (it != mirror_target.end()) target = it->second;
    }
    if (proposals.empty() || !target) {
      result.unimputable_parent_ids.push_back(parent_id);
      continue;
    }

    TradeRecord parent;
    parent.trade_id = parent_id;
    parent.user_id = *target;
    parent.open_date = tmpl->open_date;
    parent.close_date = tmpl->close_date;
    parent.asset = tmpl->asset;
    parent.units = median_of(proposals);
    parent.leverage = tmpl->leverage;
    parent.open_rate = tmpl->open_rate;
    parent.close_rate = tmpl->close_rate;
    parent.net_profit = parent.units * (tmpl->close_rate - tmpl->open_rate);
    const double leverage = tmpl->leverage > 0.0 ? tmpl->leverage : 1.0;
    parent.amount_invested = parent.units * tmpl->open_rate / leverage;
    parent.imputed = true;
    result.records.push_back(std::move(parent));
    ++result.imputed_count;
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const TradeRecord& a, const TradeRecord& b) { return a.trade_id < b.trade_id; });
  return result;
}

void PanelBuildOptions::validate() const {
  if (window_days < 1) throw std::invalid_argument("panel build: window_days must be >= 1");
}

PanelDataset build_panel(const MimicHistory& history, const PerformanceTable& performance,
                         const PanelBuildOptions& options) {
  options.validate();
  if (history.first_day != performance.first_day || history.last_day != performance.last_day)
    throw IntegrityError("build_panel: popularity and performance calendars are misaligned");

  std::set<std::int64_t> user_set;
  for (const auto& [user, scores] : performance.scores) user_set.insert(user);
  for (const auto& [user, days] : history.popularity_by_user) user_set.insert(user);

  PanelDataset panel;
  const Day first_panel_day = history.first_day + options.window_days;
  for (Day day = first_panel_day; day <= history.last_day; ++day) {
    if (options.drop_weekends && is_weekend(day)) continue;
    const Day prev = options.drop_weekends ? previous_trading_day(day) : day - 1;

    PanelDay panel_day;
    panel_day.day = day;
    for (std::int64_t user : user_set) {
      const std::optional<double> perf = performance.score(user, day);
      if (!perf) continue;  // no qualifying trades in window: excluded for the day
      std::int64_t gained = 0, lost = 0;
      for (Day x = prev + 1; x <= day; ++x) {
        gained += history.gained(user, x);
        lost += history.lost(user, x);
      }
      panel_day.user_ids.push_back(user);
      panel_day.prev_popularity.push_back(history.popularity(user, prev));
      panel_day.performance.push_back(*perf);
      panel_day.new_mimickers.push_back(gained);
      panel_day.lost_mimickers.push_back(lost);
    }
    if (!panel_day.user_ids.empty()) panel.days.push_back(std::move(panel_day));
  }
  panel.validate();
  return panel;
}

void SyntheticMarketConfig::validate() const {
  if (n_users < 2) throw std::invalid_argument("synthetic market: n_users must be >= 2");
  if (n_days < 1) throw std::invalid_argument("synthetic market: n_days must be >= 1");
  if (decisions_per_day < 0)
    throw std::invalid_argument("synthetic market: decisions_per_day must be >= 0");
  if (!(best_skill > 0.0 && best_skill < 1.0) || !(baseline_skill > 0.0 && baseline_skill < 1.0))
    throw std::invalid_argument("synthetic market: skills must lie in (0, 1)");
  if (!(unfollow_rate >= 0.0 && unfollow_rate <= 1.0))
    throw std::invalid_argument("synthetic market: unfollow_rate outside [0, 1]");
  if (window_days < 1) throw std::invalid_argument("synthetic market: window_days must be >= 1");
  socsamp::validate(generator_model);
}

SyntheticMarket generate_synthetic_market(const SyntheticMarketConfig& config) {
  config.validate();
  std::mt19937_64 engine = make_engine(derive_seed(config.seed, 0x3a11));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticMarket market;
  const std::int64_t n = config.n_users;
  market.skills.assign(static_cast<std::size_t>(n), config.baseline_skill);
  market.best_user = 1000;  // first user id; ids are 1000 + index
  market.skills[0] = config.best_skill;

  struct ActiveMirror {
    std::int64_t mirror_id;
    std::int64_t mimicker;  // user index
    std::int64_t target;    // user index
    double ratio;
    Day last_copy_day = 0;
  };
  std::vector<ActiveMirror> active;
  std::int64_t next_mirror_id = 1;
  std::int64_t next_trade_id = 1;

  // Ground-truth bookkeeping, calendar-day keyed like reconstruct_popularity.
  std::vector<std::int64_t> pop_now(static_cast<std::size_t>(n), 0);
  std::map<Day, std::vector<std::int64_t>> pop_end_of_day;
  std::map<Day, std::vector<std::int64_t>> gained_cal, lost_cal;

  // Per-user settled-trade summaries in (close_day, trade_id) order; the
  // same slices compute_performance uses, so scores match bit for bit.
  std::vector<std::vector<WindowTrade>> summaries(static_cast<std::size_t>(n));
  std::vector<std::size_t> window_lo(static_cast<std::size_t>(n), 0);

  const Day end_day = config.start_day + config.n_days - 1;
  std::uniform_int_distribution<int> unit_draw(10, 100);

  for (Day day = config.start_day; day <= end_day; ++day) {
    if (is_weekend(day)) continue;

    // Unfollow step: existing mirrors die before today's copying; their last
    // observed day stays the previous trading day.
    if (config.unfollow_rate > 0.0 && !active.empty()) {
      std::vector<ActiveMirror> survivors;
      survivors.reserve(active.size());
      for (const ActiveMirror& mirror : active) {
        if (unit(engine) < config.unfollow_rate) {
          auto& lost_day = lost_cal[mirror.last_copy_day + 1];
          lost_day.resize(static_cast<std::size_t>(n));
          lost_day[static_cast<std::size_t>(mirror.target)] += 1;
          pop_now[static_cast<std::size_t>(mirror.target)] -= 1;
        } else {
          survivors.push_back(mirror);
        }
      }
      active = std::move(survivors);
    }

    // Snapshot for today's mimic decisions: defined-performance users with
    // previous-trading-day popularity.
    MarketSnapshot snapshot;
    std::vector<std::int64_t> option_users;
    for (std::int64_t u = 0; u < n; ++u) {
      const auto& summary = summaries[static_cast<std::size_t>(u)];
      const Day window_begin = day - config.window_days;
      std::size_t& lo = window_lo[static_cast<std::size_t>(u)];
      while (lo < summary.size() && summary[lo].settle_day < window_begin) ++lo;
      // Summaries hold only trades settled before today, so everything from
      // lo onward lies inside the trailing window.
      const std::optional<double> score =
          metric_over_window(summary, lo, summary.size(), MetricKind::roi);
      if (!score) continue;
      option_users.push_back(u);
      snapshot.popularity.push_back(pop_now[static_cast<std::size_t>(u)]);
      snapshot.performance.push_back(*score);
    }
    snapshot.day = day;

    // Parent trades: one per user per trading day, unit profit with the
    // trader's skill-drawn sign.
    std::vector<TradeRecord> todays_trades;
    for (std::int64_t u = 0; u < n; ++u) {
      const double skill = market.skills[static_cast<std::size_t>(u)];
      const double sign = unit(engine) < skill ? 1.0 : -1.0;
      const double units = static_cast<double>(unit_draw(engine));
      TradeRecord t;
      t.trade_id = next_trade_id++;
      t.user_id = 1000 + u;
      t.open_date = t.close_date = day;
      t.asset = "EURUSD";
      t.units = units;
      t.leverage = 1.0;
      t.open_rate = 1.0;
      t.close_rate = 1.0 + sign / units;
      t.amount_invested = units;  // units * open_rate / leverage
      t.net_profit = sign;
      todays_trades.push_back(std::move(t));
    }

    // New mimic decisions over the snapshot.
    if (!option_users.empty() && config.decisions_per_day > 0) {
      const ProbabilityVector theta =
          decision_probabilities(config.generator_model, snapshot);
      const std::vector<std::int64_t> counts =
          sample_multinomial(config.decisions_per_day, theta, engine);
      std::int64_t total = 0;
      for (std::size_t k = 0; k < option_users.size(); ++k) {
        const std::int64_t target = option_users[k];
        for (std::int64_t c = 0; c < counts[k]; ++c) {
          std::uniform_int_distribution<std::int64_t> pick(0, n - 2);
          std::int64_t mimicker = pick(engine);
          if (mimicker >= target) ++mimicker;
          std::uniform_real_distribution<double> ratio_draw(0.05, 0.5);
          ActiveMirror mirror{next_mirror_id++, mimicker, target, ratio_draw(engine), day};
          active.push_back(mirror);
          pop_now[static_cast<std::size_t>(target)] += 1;
          gained_cal[day].resize(static_cast<std::size_t>(n));
          gained_cal[day][static_cast<std::size_t>(target)] += 1;
        }
        total += counts[k];
      }
      if (total > 0) market.daily_new_totals[day] = total;
    }

    // Copies: every active mirror mirrors its target's trade today.
    for (ActiveMirror& mirror : active) {
      const TradeRecord& parent =
          todays_trades[static_cast<std::size_t>(mirror.target)];
      TradeRecord copy;
      copy.trade_id = next_trade_id++;
      copy.user_id = 1000 + mirror.mimicker;
      copy.open_date = copy.close_date = day;
      copy.asset = parent.asset;
      copy.units = parent.units * mirror.ratio;
      copy.leverage = parent.leverage;
      copy.open_rate = parent.open_rate;
      copy.close_rate = parent.close_rate;
      copy.amount_invested = copy.units;
      copy.net_profit = copy.units * (parent.close_rate - parent.open_rate);
      copy.parent_trade_id = parent.trade_id;
      copy.mirror_id = mirror.mirror_id;
      mirror.last_copy_day = day;
      todays_trades.push_back(std::move(copy));
    }

    // Settle today's trades into the performance summaries (they become
    // visible to windows starting tomorrow).
    for (const TradeRecord& t : todays_trades) {
      summaries[static_cast<std::size_t>(t.user_id - 1000)].push_back(settled_trade(t));
      market.trades.push_back(t);
    }
    pop_end_of_day[day] = pop_now;
  }

  // Ground-truth panel, assembled with the same exclusion rules the ingest
  // path applies.
  const PerformanceMetricSpec metric{MetricKind::roi, config.window_days, true};
  const PerformanceTable performance = compute_performance(market.trades, metric);

  PanelDataset panel;
  const Day first_panel_day = performance.first_day + config.window_days;
  auto counts_at = [&](const std::map<Day, std::vector<std::int64_t>>& table, Day d,
                       std::int64_t u) -> std::int64_t {
    const auto it = table.find(d);
    if (it == table.end() || it->second.empty()) return 0;
    return it->second[static_cast<std::size_t>(u)];
  };
  for (Day day = first_panel_day; day <= performance.last_day; ++day) {
    if (is_weekend(day)) continue;
    const Day prev = previous_trading_day(day);
    PanelDay panel_day;
    panel_day.day = day;
    for (std::int64_t u = 0; u < n; ++u) {
      const std::optional<double> perf = performance.score(1000 + u, day);
      if (!perf) continue;
      std::int64_t gained = 0, lost = 0;
      for (Day x = prev + 1; x <= day; ++x) {
        gained += counts_at(gained_cal, x, u);
        lost += counts_at(lost_cal, x, u);
      }
      const auto pop_it = pop_end_of_day.find(prev);
      const std::int64_t prev_pop =
          pop_it == pop_end_of_day.end() ? 0 : pop_it->second[static_cast<std::size_t>(u)];
      panel_day.user_ids.push_back(1000 + u);
      panel_day.prev_popularity.push_back(prev_pop);
      panel_day.performance.push_back(*perf);
      panel_day.new_mimickers.push_back(gained);
      panel_day.lost_mimickers.push_back(lost);
    }
    if (!panel_day.user_ids.empty()) panel.days.push_back(std::move(panel_day));
  }
  panel.validate();
  market.panel = std::move(panel);
  return market;
}

}  // namespace socsamp
