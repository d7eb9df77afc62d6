#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace facetflow::app {

using CsvCell = std::variant<double, long long, std::string>;

/// Comma-separated table; doubles are written with %.17g so every value
/// round-trips.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Throws std::invalid_argument when the row width differs from the header.
  void add_row(std::vector<CsvCell> row);
  void add_row(const std::vector<double>& row);

  std::string str() const;
  void write(const std::filesystem::path& path) const;

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

std::string format_number(double v);

}  // namespace facetflow::app
