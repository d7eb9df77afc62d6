#include "facetflow/app/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "facetflow/error.hpp"

namespace facetflow::app {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header_.size()) {
    throw std::invalid_argument("csv row has " + std::to_string(row.size()) + " cells, header has " +
                                std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

void CsvTable::add_row(const std::vector<double>& row) {
  add_row(std::vector<CsvCell>(row.begin(), row.end()));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const auto& cells, auto&& render) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += render(cells[i]);
    }
    out += '\n';
  };
  line(header_, [](const std::string& s) { return s; });
  for (const auto& row : rows_) {
    line(row, [](const CsvCell& c) {
      if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
      if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
      return std::get<std::string>(c);
    });
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << str();
}

}  // namespace facetflow::app
