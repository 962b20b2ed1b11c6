#include "otmisfit/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "otmisfit/errors.hpp"

namespace otm::io {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<double> parse_row(const std::string& text, int line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    std::string cell = text.substr(pos, next - pos);
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    if (first == std::string::npos) parse_fail(line, "empty value");
    cell = cell.substr(first, last - first + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
      parse_fail(line, "not a finite number: '" + cell + "'");
    }
    out.push_back(value);
    pos = next + 1;
  }
  return out;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

void write_field_csv(std::ostream& out, const GridField& field) {
  const Grid2D& g = field.grid();
  out << std::setprecision(17);
  out << g.n1 << ',' << g.n2 << ',' << g.x1_min << ',' << g.x1_max << ',' << g.x2_min << ','
      << g.x2_max << '\n';
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      if (i > 0) out << ',';
      out << field(i, j);
    }
    out << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const GridField& field) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  write_field_csv(out, field);
}

GridField read_field_csv(std::istream& in) {
  std::string text;
  int line = 0;
  if (!std::getline(in, text)) parse_fail(1, "missing header");
  ++line;
  const std::vector<double> header = parse_row(text, line);
  if (header.size() != 6) parse_fail(line, "header needs 6 fields n1,n2,x1_min,x1_max,x2_min,x2_max");
  if (header[0] != std::floor(header[0]) || header[1] != std::floor(header[1])) {
    parse_fail(line, "n1 and n2 must be integers");
  }
  Grid2D grid;
  try {
    grid = Grid2D::from_extents(static_cast<int>(header[0]), static_cast<int>(header[1]),
                                header[2], header[3], header[4], header[5]);
  } catch (const Error& e) {
    parse_fail(line, e.what());
  }
  GridField field(grid);
  for (int j = 0; j < grid.n2; ++j) {
    if (!std::getline(in, text)) parse_fail(line + 1, "expected " + std::to_string(grid.n2) + " rows");
    ++line;
    const std::vector<double> row = parse_row(text, line);
    if (static_cast<int>(row.size()) != grid.n1) {
      parse_fail(line, "expected " + std::to_string(grid.n1) + " values, got " +
                           std::to_string(row.size()));
    }
    for (int i = 0; i < grid.n1; ++i) field(i, j) = row[static_cast<std::size_t>(i)];
  }
  while (std::getline(in, text)) {
    ++line;
    if (!blank(text)) parse_fail(line, "unexpected trailing data");
  }
  return field;
}

GridField read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return read_field_csv(in);
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_signal_csv(std::ostream& out, const Signal1D& signal) {
  out << std::setprecision(17);
  for (int k = 0; k < signal.size(); ++k) out << signal.x(k) << ',' << signal.values[static_cast<std::size_t>(k)] << '\n';
}

Signal1D read_signal_csv(std::istream& in) {
  std::string text;
  int line = 0;
  std::vector<double> xs;
  std::vector<double> vs;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    const std::vector<double> row = parse_row(text, line);
    if (row.size() != 2) parse_fail(line, "expected x,value");
    xs.push_back(row[0]);
    vs.push_back(row[1]);
  }
  if (xs.size() < 2) parse_fail(line, "need at least two samples");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double expect = xs.front() + dx * static_cast<double>(k);
    if (std::abs(xs[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      parse_fail(static_cast<int>(k) + 1, "samples are not uniformly spaced");
    }
  }
  return Signal1D(xs.front(), xs.back(), std::move(vs));
}

}  // namespace otm::io
