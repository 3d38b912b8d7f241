#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tow {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// Named scalar fields followed by an optional table. Insertion order is kept
/// so output is byte-stable.
struct Report {
  std::string title;
  std::vector<std::pair<std::string, Cell>> fields;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::vector<double>>> series;  ///< lists such as residual histories

  Report& add(const std::string& key, Cell value) {
    fields.emplace_back(key, std::move(value));
    return *this;
  }
  Report& add_series(const std::string& key, std::vector<double> values) {
    series.emplace_back(key, std::move(values));
    return *this;
  }
};

enum class Format { Text, Csv, Json };

const char* to_string(Format f);
Format format_from_string(const std::string& name);

/// Text: `key = value` lines then the table; Csv: the table (or key,value
/// rows when there is none); Json: one object with shortest round-trip floats,
/// other formats use %.17g. Throws
/// NonFinite naming the offending entry when any value is NaN or infinite,
/// and InvalidArgument when a row width differs from the header.
std::string render_report(const Report& report, Format format);
/// Writes render_report to path ("-" for stdout); IoError on failure.
void emit_report(const Report& report, Format format, const std::string& path);

/// Writes text to a file; IoError on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace tow
