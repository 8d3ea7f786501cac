#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "socsamp/dates.hpp"
#include "socsamp/models.hpp"

namespace socsamp {

// One user-day slice of the panel: the market snapshot every decision that
// day conditions on (previous-day popularity, trailing-window performance)
// plus the realized new/lost mimicker counts.
struct PanelDay {
  Day day = 0;
  std::vector<std::int64_t> user_ids;
  std::vector<std::int64_t> prev_popularity;
  std::vector<double> performance;
  std::vector<std::int64_t> new_mimickers;
  std::vector<std::int64_t> lost_mimickers;

  std::size_t size() const { return user_ids.size(); }
  std::int64_t total_new() const;
  MarketSnapshot snapshot() const;
  void validate() const;
};

struct PanelDataset {
  std::vector<PanelDay> days;

  std::size_t row_count() const;
  std::vector<std::int64_t> distinct_users() const;  // sorted
  void validate() const;
};

// Panel CSV: day,user_id,performance,prev_popularity,new_mimickers,lost_mimickers
// with ISO dates. Rows are canonicalized to (day, user_id) ascending order on
// both read and write, so write(read(x)) round-trips canonical files.
void write_panel_csv(std::ostream& os, const PanelDataset& panel);
PanelDataset read_panel_csv(std::istream& is);
PanelDataset read_panel_file(const std::string& path);
void write_panel_file(const std::string& path, const PanelDataset& panel);

}  // namespace socsamp
