#include "phimi/csv.hpp"

#include <charconv>
#include <fstream>
#include <vector>

#include "phimi/error.hpp"

namespace phimi {

namespace {

std::vector<std::string> split_row(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  return fields;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

PairedSample ingest_csv(std::istream& in, const std::string& x_col, const std::string& y_col,
                        ValueKind kind) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty input, expected a header row", line_no);
  const auto header = split_row(line, line_no);
  auto column = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (strip(header[c]) == name) return c;
    }
    throw ParseError("column '" + name + "' not found in header", line_no);
  };
  const std::size_t cx = column(x_col), cy = column(y_col);

  std::vector<std::string> xs, ys;
  std::vector<double> xr, yr;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty() || line == "\r") continue;
    const auto row = split_row(line, line_no);
    if (row.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(row.size()),
                       line_no);
    }
    for (std::size_t c : {cx, cy}) {
      const std::string v = strip(row[c]);
      if (v.empty() || v == "NA") {
        throw MissingValueError("line " + std::to_string(line_no) +
                                ": missing value in column '" + strip(header[c]) + "'");
      }
      if (kind == ValueKind::Categorical) {
        (c == cx ? xs : ys).push_back(v);
        continue;
      }
      double d = 0.0;
      const auto res = std::from_chars(v.data(), v.data() + v.size(), d);
      if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ParseError("non-numeric value '" + v + "' in column '" + strip(header[c]) + "'",
                         line_no);
      }
      (c == cx ? xr : yr).push_back(d);
    }
  }
  if (kind == ValueKind::Categorical) {
    return PairedSample::categorical(std::move(xs), std::move(ys));
  }
  return PairedSample::real(std::move(xr), std::move(yr));
}

PairedSample ingest_csv(const std::string& path, const std::string& x_col,
                        const std::string& y_col, ValueKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ingest_csv(in, x_col, y_col, kind);
}

}  // namespace phimi
