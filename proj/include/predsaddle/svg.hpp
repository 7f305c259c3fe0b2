#pragma once

#include <filesystem>
#include <string>

#include "predsaddle/csv.hpp"

namespace predsaddle {

enum class PlotKind { line, scatter };

struct PlotOptions {
  PlotKind kind = PlotKind::line;
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

// Self-contained 800x600 SVG. Line plots draw every column against the first;
// scatter plots draw the last column against the second-to-last. Output
// contains no timestamps, so equal tables give equal bytes.
std::string render_plot(const CsvTable& table, const PlotOptions& opts);

void emit_plot(const std::filesystem::path& csv_path, const PlotOptions& opts,
               const std::filesystem::path& out_svg);

}  // namespace predsaddle
