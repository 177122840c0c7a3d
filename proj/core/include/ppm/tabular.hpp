#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ppm::io {

/// Shortest decimal that round-trips to the same double; locale independent.
std::string format_number(double v);

double parse_number(std::string_view s);

/// Tab-separated columns under a one-line header.
class TableWriter {
 public:
  TableWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);

  TableWriter& operator<<(double v);
  TableWriter& operator<<(std::int64_t v);
  TableWriter& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
  TableWriter& operator<<(std::uint64_t v) { return *this << static_cast<std::int64_t>(v); }
  TableWriter& operator<<(std::string_view v);
  void end_row();
  void close();

 private:
  void sep();
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string line_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  std::vector<double> numbers(std::string_view name) const;
};

Table read_table(const std::filesystem::path& path);

}  // namespace ppm::io
