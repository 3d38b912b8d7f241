#include "tow/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "tow/errors.hpp"

namespace tow {

namespace {

std::string number(double v, const std::string& where) {
  if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "non-finite value in '" + where + "'");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string cell(const Cell& c, const std::string& where) {
  if (const auto* d = std::get_if<double>(&c)) return number(*d, where);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const auto& s = std::get<std::string>(c);
  return s;
}

nlohmann::ordered_json json_cell(const Cell& c, const std::string& where) {
  if (const auto* d = std::get_if<double>(&c)) {
    number(*d, where);
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

std::string list(const std::vector<double>& v, const std::string& where, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + number(v[i], where);
  return out;
}

void check_table(const Report& r) {
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    if (r.rows[i].size() != r.columns.size())
      throw Error(ErrorKind::InvalidArgument, "row " + std::to_string(i) + " width differs from the header");
}

}  // namespace

const char* to_string(Format f) {
  switch (f) {
    case Format::Text: return "text";
    case Format::Csv: return "csv";
    case Format::Json: return "json";
  }
  return "text";
}

Format format_from_string(const std::string& name) {
  if (name == "text") return Format::Text;
  if (name == "csv") return Format::Csv;
  if (name == "json" || name == "json-style") return Format::Json;
  throw Error(ErrorKind::InvalidArgument, "unknown format '" + name + "'");
}

std::string render_report(const Report& r, Format format) {
  check_table(r);
  std::string out;
  switch (format) {
    case Format::Text: {
      if (!r.title.empty()) out += "# " + r.title + "\n";
      for (const auto& [k, v] : r.fields) out += k + " = " + cell(v, k) + "\n";
      for (const auto& [k, v] : r.series) out += k + " = " + list(v, k, ",") + "\n";
      if (!r.columns.empty()) {
        out += "\n";
        for (std::size_t j = 0; j < r.columns.size(); ++j) out += (j ? "," : "") + csv_field(r.columns[j]);
        out += "\n";
        for (const auto& row : r.rows) {
          for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + csv_field(cell(row[j], r.columns[j]));
          out += "\n";
        }
      }
      return out;
    }
    case Format::Csv: {
      if (r.columns.empty()) {
        out = "key,value\n";
        for (const auto& [k, v] : r.fields) out += csv_field(k) + "," + csv_field(cell(v, k)) + "\n";
        return out;
      }
      for (std::size_t j = 0; j < r.columns.size(); ++j) out += (j ? "," : "") + csv_field(r.columns[j]);
      out += "\n";
      for (const auto& row : r.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + csv_field(cell(row[j], r.columns[j]));
        out += "\n";
      }
      return out;
    }
    case Format::Json: {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      if (!r.title.empty()) j["report"] = r.title;
      for (const auto& [k, v] : r.fields) j[k] = json_cell(v, k);
      for (const auto& [k, v] : r.series) {
        auto& arr = j[k] = nlohmann::ordered_json::array();
        for (double d : v) arr.push_back(json_cell(d, k));
      }
      if (!r.columns.empty()) {
        auto& rows = j["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : r.rows) {
          nlohmann::ordered_json o = nlohmann::ordered_json::object();
          for (std::size_t c = 0; c < r.columns.size(); ++c) o[r.columns[c]] = json_cell(row[c], r.columns[c]);
          rows.push_back(std::move(o));
        }
      }
      return j.dump(2) + "\n";
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

void emit_report(const Report& report, Format format, const std::string& path) {
  write_text(path, render_report(report, format));
}

}  // namespace tow
