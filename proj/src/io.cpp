#include "binreg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

#include "binreg/error.hpp"

namespace binreg {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string where(std::size_t line, std::size_t col) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    for (auto f : split(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw CsvError("missing header row");

  std::optional<std::size_t> ycol;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "y") {
      if (ycol) throw CsvError("duplicate 'y' column in header");
      ycol = j;
    } else {
      names.push_back(header[j]);
    }
  }
  if (!ycol) throw CsvError("header has no column named 'y'");
  if (names.empty()) throw CsvError("header has no predictor columns");

  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw CsvError("line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                     " fields, header has " + std::to_string(header.size()));
    }
    Row row;
    row.x.reserve(names.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto v = parse_double(fields[j]);
      if (!v) {
        throw CsvError("non-numeric value '" + std::string(fields[j]) + "' at " +
                       where(lineno, j + 1));
      }
      if (!std::isfinite(*v)) {
        throw NonFiniteValue("non-finite value '" + std::string(fields[j]) + "' at " +
                             where(lineno, j + 1));
      }
      if (j == *ycol) {
        if (*v == 0.0) {
          row.y = 0;
        } else if (*v == 1.0) {
          row.y = 1;
        } else {
          throw NonBinaryLabel("label '" + std::string(fields[j]) + "' at " +
                               where(lineno, j + 1) + " is not 0 or 1");
        }
      } else {
        row.x.push_back(*v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("no data rows after header");
  return CsvTable{build_dataset(rows), std::move(names)};
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path.string() + "'");
  return parse_csv(in);
}

void write_csv(std::ostream& out, const Dataset& ds) {
  for (std::size_t j = 0; j < ds.d(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  char buf[64];
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j) {
      const double v = ds.x()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << ds.y()[i] << '\n';
  }
}

}  // namespace binreg
