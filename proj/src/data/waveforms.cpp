// Apache License, Version 2.0, refer to LICENSE.txt

#include "spikemix/waveforms.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string_view>
#include <vector>

namespace spikemix {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

RowMatrix read_numeric_csv(std::istream& in, bool has_header, const std::string& source) {
  std::vector<double> cells;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::size_t fields = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = body.find(',', start);
      const std::string_view cell =
          trim(body.substr(start, comma == std::string_view::npos ? body.npos : comma - start));
      double value = 0.0;
      if (!parse_double(cell, value))
        throw ParseError(source + ": row " + std::to_string(line_no) + ", field " +
                         std::to_string(fields + 1) + ": non-numeric cell '" +
                         std::string(cell) + "'");
      cells.push_back(value);
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      width = fields;
    } else if (fields != width) {
      throw ParseError(source + ": row " + std::to_string(line_no) + " has " +
                       std::to_string(fields) + " fields, expected " + std::to_string(width));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(source + ": no data rows");
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
  std::copy(cells.begin(), cells.end(), m.data());
  return m;
}

WaveformMatrix load_waveforms(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return WaveformMatrix{read_numeric_csv(in, has_header, path), std::nullopt};
}

}  // namespace spikemix
