#include "butterfly/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "butterfly/errors.hpp"

namespace bfm::csv {

std::string format_double(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write(const std::filesystem::path& path, const Row& header,
           const std::vector<Row>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  auto emit = [&](const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  emit(header);
  for (const Row& row : rows) emit(row);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::vector<double>> read_columns(const std::filesystem::path& path,
                                              const std::vector<std::string>& expected_columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw argument_error(path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream header(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(header, cell, ',')) {
      if (col >= expected_columns.size() || cell != expected_columns[col])
        throw argument_error(path.string() + ": expected column '" +
                             (col < expected_columns.size() ? expected_columns[col] : "<none>") +
                             "', found '" + cell + "'");
      ++col;
    }
    if (col != expected_columns.size())
      throw argument_error(path.string() + ": wrong number of columns");
  }
  std::vector<std::vector<double>> columns(expected_columns.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream rowstream(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(rowstream, cell, ',')) {
      if (col >= columns.size())
        throw argument_error(path.string() + ": too many cells on line " +
                             std::to_string(line_no));
      double value = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw argument_error(path.string() + ": bad number '" + cell + "' on line " +
                             std::to_string(line_no));
      columns[col++].push_back(value);
    }
    if (col != columns.size())
      throw argument_error(path.string() + ": short row on line " + std::to_string(line_no));
  }
  return columns;
}

}  // namespace bfm::csv
