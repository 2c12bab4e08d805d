#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ccm/graph.hpp"

namespace ccm {

// Shortest round-trip representation; locale-independent so outputs are
// byte-stable across runs and machines.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

inline std::string format_int(std::int64_t x) {
  char buf[24];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

class CsvWriter {
public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw DataError("cannot open for writing: " + path);
  }

  void header(std::span<const std::string> names) { raw_row(names); }

  template <typename... Ts>
  void row(const Ts&... vals) {
    bool first = true;
    ((write_cell(vals, first), first = false), ...);
    out_ << '\n';
  }

  void raw_row(std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void flush() { out_.flush(); }

private:
  void write_cell(double v, bool first) {
    if (!first) out_ << ',';
    out_ << format_double(v);
  }
  void write_cell(std::int64_t v, bool first) {
    if (!first) out_ << ',';
    out_ << format_int(v);
  }
  void write_cell(int v, bool first) { write_cell(static_cast<std::int64_t>(v), first); }
  void write_cell(std::size_t v, bool first) { write_cell(static_cast<std::int64_t>(v), first); }
  void write_cell(const std::string& v, bool first) {
    if (!first) out_ << ',';
    out_ << v;
  }
  void write_cell(const char* v, bool first) {
    if (!first) out_ << ',';
    out_ << v;
  }

  std::ofstream out_;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

} // namespace ccm
