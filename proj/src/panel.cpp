#include "socsamp/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "socsamp/csv.hpp"

namespace socsamp {

std::int64_t PanelDay::total_new() const {
  std::int64_t total = 0;
  for (std::int64_t n : new_mimickers) total += n;
  return total;
}

MarketSnapshot PanelDay::snapshot() const {
  MarketSnapshot snap;
  snap.day = day;
  snap.popularity = prev_popularity;
  snap.performance = performance;
  return snap;
}

void PanelDay::validate() const {
  const std::size_t n = user_ids.size();
  if (prev_popularity.size() != n || performance.size() != n || new_mimickers.size() != n ||
      lost_mimickers.size() != n)
    throw std::invalid_argument("panel day: column length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (prev_popularity[i] < 0 || new_mimickers[i] < 0 || lost_mimickers[i] < 0)
      throw std::invalid_argument("panel day: negative count");
    if (!std::isfinite(performance[i]))
      throw std::invalid_argument("panel day: non-finite performance");
  }
}

std::size_t PanelDataset::row_count() const {
  std::size_t n = 0;
  for (const PanelDay& d : days) n += d.size();
  return n;
}

std::vector<std::int64_t> PanelDataset::distinct_users() const {
  std::set<std::int64_t> users;
  for (const PanelDay& d : days) users.insert(d.user_ids.begin(), d.user_ids.end());
  return {users.begin(), users.end()};
}

void PanelDataset::validate() const {
  for (std::size_t i = 0; i < days.size(); ++i) {
    days[i].validate();
    if (i > 0 && days[i].day <= days[i - 1].day)
      throw std::invalid_argument("panel: days must be strictly increasing");
  }
}

namespace {

const char* kPanelHeader = "day,user_id,performance,prev_popularity,new_mimickers,lost_mimickers";

struct PanelRow {
  Day day;
  std::int64_t user_id;
  double performance;
  std::int64_t prev_popularity;
  std::int64_t new_mimickers;
  std::int64_t lost_mimickers;
};

PanelDataset assemble(std::vector<PanelRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const PanelRow& a, const PanelRow& b) {
    if (a.day != b.day) return a.day < b.day;
    return a.user_id < b.user_id;
  });
  PanelDataset panel;
  for (const PanelRow& row : rows) {
    if (panel.days.empty() || panel.days.back().day != row.day) {
      panel.days.emplace_back();
      panel.days.back().day = row.day;
    }
    PanelDay& d = panel.days.back();
    d.user_ids.push_back(row.user_id);
    d.prev_popularity.push_back(row.prev_popularity);
    d.performance.push_back(row.performance);
    d.new_mimickers.push_back(row.new_mimickers);
    d.lost_mimickers.push_back(row.lost_mimickers);
  }
  panel.validate();
  return panel;
}

}  // namespace

void write_panel_csv(std::ostream& os, const PanelDataset& panel) {
  os << kPanelHeader << '\n';
  std::vector<PanelRow> rows;
  rows.reserve(panel.row_count());
  for (const PanelDay& d : panel.days)
    for (std::size_t i = 0; i < d.size(); ++i)
      rows.push_back({d.day, d.user_ids[i], d.performance[i], d.prev_popularity[i],
                      d.new_mimickers[i], d.lost_mimickers[i]});
  std::sort(rows.begin(), rows.end(), [](const PanelRow& a, const PanelRow& b) {
    if (a.day != b.day) return a.day < b.day;
    return a.user_id < b.user_id;
  });
  for (const PanelRow& r : rows) {
    write_csv_row(os, {format_date(r.day), format_int(r.user_id), format_double(r.performance),
                       format_int(r.prev_popularity), format_int(r.new_mimickers),
                       format_int(r.lost_mimickers)});
  }
}

PanelDataset read_panel_csv(std::istream& is) {
  auto header = read_csv_record(is);
  if (!header) throw std::invalid_argument("panel csv: empty file");
  {
    std::ostringstream joined;
    for (std::size_t i = 0; i < header->size(); ++i) {
      if (i) joined << ',';
      joined << (*header)[i];
    }
    if (joined.str() != kPanelHeader)
      throw std::invalid_argument("panel csv: unexpected header '" + joined.str() + "'");
  }
  std::vector<PanelRow> rows;
  std::size_t line = 1;
  while (auto rec = read_csv_record(is)) {
    ++line;
    if (rec->size() == 1 && (*rec)[0].empty()) continue;  // trailing blank line
    if (rec->size() != 6)
      throw std::invalid_argument("panel csv: row " + std::to_string(line) +
                                  ": expected 6 columns");
    const auto day = parse_date((*rec)[0]);
    const auto user = parse_int((*rec)[1]);
    const auto perf = parse_double((*rec)[2]);
    const auto pop = parse_int((*rec)[3]);
    const auto gained = parse_int((*rec)[4]);
    const auto lost = parse_int((*rec)[5]);
    if (!day || !user || !perf || !pop || !gained || !lost)
      throw std::invalid_argument("panel csv: row " + std::to_string(line) +
                                  ": malformed field");
    rows.push_back({*day, *user, *perf, *pop, *gained, *lost});
  }
  return assemble(std::move(rows));
}

PanelDataset read_panel_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("panel csv: cannot open " + path);
  return read_panel_csv(in);
}

void write_panel_file(const std::string& path, const PanelDataset& panel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("panel csv: cannot write " + path);
  write_panel_csv(out, panel);
}

}  // namespace socsamp
