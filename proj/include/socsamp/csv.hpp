#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socsamp {

// RFC 4180 quoting: fields containing commas, quotes or newlines are quoted,
// with embedded quotes doubled.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

// Reads one record; quoted fields may span lines. nullopt at end of input.
std::optional<std::vector<std::string>> read_csv_record(std::istream& is);

// Shortest round-trip decimal rendering (std::to_chars).
std::string format_double(double v);
std::string format_int(std::int64_t v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

}  // namespace socsamp
