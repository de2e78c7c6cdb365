#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bfm::svg {

struct Series {
  std::string name;
  std::vector<double> y;
};

/// Minimal line chart: all series against a shared x axis. Convenience output
/// only; the CSVs carry the data contract.
void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::vector<double>& x, const std::vector<Series>& series);

}  // namespace bfm::svg
