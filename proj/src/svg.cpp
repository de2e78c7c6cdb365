#include "butterfly/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "butterfly/csv.hpp"

namespace bfm::svg {

namespace {
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
}

void write_line_chart(const std::filesystem::path& path, const std::string& title,
                      const std::vector<double>& x, const std::vector<Series>& series) {
  constexpr double kW = 720, kH = 420, kMargin = 60;
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  if (!x.empty()) {
    x_lo = *std::min_element(x.begin(), x.end());
    x_hi = *std::max_element(x.begin(), x.end());
  }
  bool first = true;
  for (const auto& s : series)
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      if (first) { y_lo = y_hi = v; first = false; }
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (y_hi == y_lo) y_hi = y_lo + 1;
  auto px = [&](double v) { return kMargin + (v - x_lo) / (x_hi - x_lo) * (kW - 2 * kMargin); };
  auto py = [&](double v) { return kH - kMargin - (v - y_lo) / (y_hi - y_lo) * (kH - 2 * kMargin); };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
      << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kH - kMargin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kH - kMargin + 18 << "\" font-size=\"11\">"
      << csv::format_double(x_lo) << "</text>\n"
      << "<text x=\"" << kW - kMargin << "\" y=\"" << kH - kMargin + 18
      << "\" text-anchor=\"end\" font-size=\"11\">" << csv::format_double(x_hi) << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kH - kMargin
      << "\" text-anchor=\"end\" font-size=\"11\">" << csv::format_double(y_lo) << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin
      << "\" text-anchor=\"end\" font-size=\"11\">" << csv::format_double(y_hi) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 6] << "\" points=\"";
    for (std::size_t i = 0; i < series[s].y.size() && i < x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      out << px(x[i]) << ',' << py(series[s].y[i]) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kW - kMargin + 6 << "\" y=\"" << kMargin + 16 * s
        << "\" font-size=\"11\" fill=\"" << kPalette[s % 6] << "\">" << series[s].name
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace bfm::svg
