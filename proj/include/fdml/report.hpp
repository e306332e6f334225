#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fdml/analysis.hpp"
#include "fdml/dml.hpp"
#include "fdml/grid.hpp"

namespace fdml {

// "0.16***"; "ns" cells show the value only.
std::string format_cell(double value, double p, int digits = 2);

struct RenderOptions {
  bool side_adjusted = false;
  int digits = 2;
};

// Fixed-width K x K text grid; diagonal shown as 0, reference cell bracketed.
std::string render_matrix_text(const BetaMatrix& matrix, const RenderOptions& options = {});

struct HeatmapOptions {
  std::string title;
  int digits = 2;
};

// Diverging blue-white-red scale centred at zero, star annotations, reference
// cell outlined.
std::string render_heatmap_svg(const SquareGrid<double>& values, const SquareGrid<double>& p,
                               TreatmentCell omitted, const HeatmapOptions& options = {});

// league -> percentage of team appearances per group (rows sum to 100).
std::map<std::string, std::vector<double>> formation_usage(std::span<const AnalysisRow> rows);

struct FormationAverages {
  std::vector<double> goals, red_cards, yellow_cards, possession, corners;
  std::vector<long> appearances;
};
FormationAverages formation_averages(std::span<const AnalysisRow> rows);

std::string usage_to_csv(const std::map<std::string, std::vector<double>>& usage);
std::string averages_to_csv(const FormationAverages& averages);

// Writes the run directory. File names are fixed:
//   config.txt beta.csv beta_display.csv beta_side.csv se.csv pvalue.csv
//   stars.csv counts.csv matrix.txt heatmap.svg residual_summary.csv
//   first_stage.csv diagnostics.txt
void write_run_artifacts(const std::filesystem::path& dir, const PipelineResult& result, const RunConfig& config,
                         bool side_adjusted);

}  // namespace fdml
