#pragma once

// CSV emission and parsing for sweep output.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "aqc/error.hpp"
#include "aqc/observables.hpp"

namespace aqc {

inline constexpr std::string_view kCsvHeader = "T,sz1,sz2,sz_total,n1,n2,g2_1,g2_2,norm,excitation";

// Shortest round-trip decimal when it needs at most `precision` significant
// digits, otherwise the value rounded to `precision` digits.
inline std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  const std::string_view shortest(buf, static_cast<std::size_t>(res.ptr - buf));
  if (std::isinf(v)) return std::string(shortest);

  int digits = 0;
  bool leading = true;
  int trailing_zeros = 0;
  for (char c : shortest.substr(0, shortest.find_first_of("eE"))) {
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++digits;
    trailing_zeros = c == '0' ? trailing_zeros + 1 : 0;
  }
  // Trailing zeros before the decimal point (e.g. 1200) are not significant.
  if (shortest.find_first_of(".eE") == std::string_view::npos) digits -= trailing_zeros;
  if (digits <= precision) return std::string(shortest);

  res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

inline std::string csv_row(const ObservableSample& s, int precision) {
  const double values[] = {s.t_dimensionless, s.sz1, s.sz2,  s.sz_total, s.n1,
                           s.n2,              s.g2_1, s.g2_2, s.norm,    s.excitation};
  std::string line;
  for (std::size_t i = 0; i < std::size(values); ++i) {
    if (i) line += ',';
    line += format_number(values[i], precision);
  }
  return line;
}

inline std::string csv_text(const std::vector<ObservableSample>& samples, int precision) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& s : samples) {
    out += csv_row(s, precision);
    out += '\n';
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws InvalidArgument when absent.
  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw InvalidArgument("CSV has no column '" + std::string(name) + "'");
  }
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::string csv_line_error(std::size_t line, std::string_view what) {
  return "malformed CSV at line " + std::to_string(line) + ": " + std::string(what);
}

}  // namespace detail

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) throw MalformedCsv(detail::csv_line_error(line_no, "empty line"));

    const auto fields = detail::split_commas(line);
    if (line_no == 1) {
      for (auto f : fields) {
        if (f.empty()) throw MalformedCsv(detail::csv_line_error(line_no, "empty column name"));
        table.header.emplace_back(f);
      }
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw MalformedCsv(detail::csv_line_error(
          line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                       std::to_string(fields.size())));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw MalformedCsv(detail::csv_line_error(line_no, "invalid number '" + std::string(f) + "'"));
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw MalformedCsv(detail::csv_line_error(1, "missing header"));
  if (table.rows.empty()) throw MalformedCsv(detail::csv_line_error(2, "no data rows"));
  return table;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("cannot write '" + path + "'");
}

}  // namespace aqc
