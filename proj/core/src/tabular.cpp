#include "ppm/tabular.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ppm::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

TableWriter::TableWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), path_(path), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) line_ += '\t';
    line_ += columns[i];
  }
  line_ += '\n';
  out_ << line_;
  line_.clear();
}

void TableWriter::sep() {
  if (filled_ == columns_) throw std::logic_error("too many cells in row of " + path_.string());
  if (filled_++) line_ += '\t';
}

TableWriter& TableWriter::operator<<(double v) {
  sep();
  line_ += format_number(v);
  return *this;
}

TableWriter& TableWriter::operator<<(std::int64_t v) {
  sep();
  line_ += std::to_string(v);
  return *this;
}

TableWriter& TableWriter::operator<<(std::string_view v) {
  sep();
  line_ += v;
  return *this;
}

void TableWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("short row in " + path_.string());
  line_ += '\n';
  out_ << line_;
  line_.clear();
  filled_ = 0;
}

void TableWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("failed writing " + path_.string());
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no column named '" + std::string(name) + "'");
}

std::vector<double> Table::numbers(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_number(r.at(c)));
  return out;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  t.header = split_tabs(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != t.header.size()) throw std::runtime_error("ragged row in " + path.string());
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace ppm::io
