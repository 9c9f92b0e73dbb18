#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace specshare {

enum class PlotKind { Line, Heatmap };

struct ReportOptions {
  // Column to plot; defaults to aoi2 for line plots (aoi2_sim when only simulated
  // ages are present) and P3 for heatmaps.
  std::optional<std::string> metric;
  // Forced plot kind; by default a two-parameter sweep becomes a line plot when its
  // inner parameter has at most kMaxCurves values and a heatmap otherwise.
  std::optional<PlotKind> kind;
};

inline constexpr std::size_t kMaxCurves = 8;

// Parsed sweep CSV: one vector of cells per column, empty cells kept as NaN.
struct SweepTable {
  std::vector<std::string> columns;
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, std::vector<bool>> present;
  std::size_t rows = 0;
};

// Throws ConfigError naming the first missing sweep column, an unexpected column or a
// malformed cell; an empty body is an error.
SweepTable parse_sweep_csv(const std::string& text);

// Pure function of the CSV content.
std::string render_report(const std::string& csv_text, const ReportOptions& options = {});

// Reads the CSV, renders, and only then writes the SVG, so nothing is written on error.
void write_report(const std::filesystem::path& csv, const std::filesystem::path& svg,
                  const ReportOptions& options = {});

}  // namespace specshare
