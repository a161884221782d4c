#include "ipursuit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "ipursuit/error.hpp"

namespace ipursuit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

bool parse_label(std::string_view cell, int& out) {
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && out >= 0;
}

}  // namespace

DataMatrix parse_csv(std::string_view text) {
  struct Row {
    std::ptrdiff_t line;
    std::vector<std::string_view> cells;
  };
  std::vector<Row> rows;
  std::ptrdiff_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (trim(line).empty()) continue;
    rows.push_back(Row{line_no, split_cells(line)});
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "no rows");

  bool has_labels = false;
  std::size_t first = 0;
  double probe = 0.0;
  // A header has no numeric cell; a row with any number is data.
  if (std::none_of(rows.front().cells.begin(), rows.front().cells.end(),
                   [&](std::string_view cell) { return parse_number(cell, probe); })) {
    first = 1;
    has_labels = rows.front().cells.back() == "label";
  }
  if (first == rows.size()) throw Error(ErrorCode::EmptyFile, "header without data rows");

  const std::size_t width = rows.front().cells.size();
  const std::size_t dims = has_labels ? width - 1 : width;
  if (dims == 0) throw Error(ErrorCode::ParseError, "no coordinate columns", rows.front().line);
  const Index n = static_cast<Index>(rows.size() - first);
  DataMatrix out{Matrix(static_cast<Index>(dims), n), std::nullopt};
  if (has_labels) out.labels = Labels(static_cast<std::size_t>(n));

  for (std::size_t r = first; r < rows.size(); ++r) {
    const Row& row = rows[r];
    const Index col = static_cast<Index>(r - first);
    if (row.cells.size() != width)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(row.line) + ": expected " + std::to_string(width) + " cells", row.line);
    for (std::size_t c = 0; c < dims; ++c) {
      double v = 0.0;
      if (!parse_number(row.cells[c], v))
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(row.line) + ": bad number '" + std::string(row.cells[c]) + "'", row.line);
      out.points(static_cast<Index>(c), col) = v;
    }
    if (has_labels) {
      int label = 0;
      if (!parse_label(row.cells.back(), label))
        throw Error(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": bad label", row.line);
      (*out.labels)[static_cast<std::size_t>(col)] = label;
    }
    const double norm = out.points.col(col).norm();
    if (norm == 0.0) throw Error(ErrorCode::ZeroRow, "line " + std::to_string(row.line) + " is all zeros", row.line);
    out.points.col(col) /= norm;
  }
  return out;
}

DataMatrix load_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string labels_csv(const Labels& labels) {
  std::string out;
  for (int l : labels) {
    out += std::to_string(l);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path.string());
  }
}

}  // namespace ipursuit
