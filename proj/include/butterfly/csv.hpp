#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bfm::csv {

/// Shortest round-trip decimal representation ('.' separator, no locale).
std::string format_double(double value);

using Row = std::vector<std::string>;

/// Writes UTF-8 CSV with a header row and '\n' line endings.
void write(const std::filesystem::path& path, const Row& header, const std::vector<Row>& rows);

/// Reads a CSV whose header must match `expected_columns` exactly; returns
/// one vector per column.
std::vector<std::vector<double>> read_columns(const std::filesystem::path& path,
                                              const std::vector<std::string>& expected_columns);

}  // namespace bfm::csv
