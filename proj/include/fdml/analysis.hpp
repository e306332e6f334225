#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdml/cell.hpp"
#include "fdml/fixture.hpp"
#include "fdml/formation.hpp"
#include "fdml/strength.hpp"

namespace fdml {

// Per season-league: drop rounds <= drop_first and rounds > max_round - drop_last.
std::vector<Fixture> filter_rounds(std::span<const Fixture> fixtures, int drop_first = 2, int drop_last = 4);

// Keeps fixtures whose stage label is empty or one of `regular_labels`
// (case-insensitive). Play-off and play-out rows are dropped.
std::vector<Fixture> filter_stages(std::span<const Fixture> fixtures,
                                   std::span<const std::string> regular_labels = {});

// One fixture seen from one team.
struct AnalysisRow {
  std::string fixture_id;
  std::string league;
  bool is_home = true;
  TreatmentCell cell;
  double outcome = 0;  // main minus rival for the selected target
  TeamStats main_stats;
  TeamStats rival_stats;
  std::vector<double> confounders;
};

// Column positions inside AnalysisRow::confounders.
struct ConfounderLayout {
  std::vector<std::string> names;
  std::size_t shared_width = 0;  // season/league/day one-hots and weather
  std::size_t is_home_column = 0;
  std::size_t main_offset = 0;
  std::size_t rival_offset = 0;

  std::size_t width() const noexcept { return names.size(); }
};

// Learns the categorical levels and weather medians from a fixture set and
// turns a fixture into its shared (perspective-independent) columns.
class ConfounderEncoder {
 public:
  static ConfounderEncoder fit(std::span<const Fixture> fixtures);

  std::vector<double> shared_columns(const Fixture& fixture) const;
  const ConfounderLayout& layout() const noexcept { return layout_; }

 private:
  std::vector<std::string> seasons_;
  std::vector<std::string> leagues_;
  bool weather_ = false;
  double temperature_median_ = 0;
  double humidity_median_ = 0;
  ConfounderLayout layout_;
};

struct PerspectiveInputs {
  FormationGroup home_group;
  FormationGroup away_group;
  std::vector<double> shared;
  StrengthFeatures home_strength;
  StrengthFeatures away_strength;
};

// Row 0: home perspective (outcome home - away, cell (home, away), is_home 1).
// Row 1: the same fixture from the away side, everything mirrored.
std::array<AnalysisRow, 2> expand_perspectives(const Fixture& fixture, Target target,
                                               const PerspectiveInputs& inputs);

// The sibling perspective of a row: outcome negated, cell transposed,
// home flag flipped, strength blocks swapped.
AnalysisRow mirror_row(const AnalysisRow& row, const ConfounderLayout& layout);

struct AnalysisTable {
  Target target = Target::goals;
  ConfounderLayout layout;
  std::vector<AnalysisRow> rows;

  Eigen::MatrixXd confounder_matrix() const;
  Eigen::VectorXd outcomes() const;
  std::vector<std::string> fixture_ids() const;
  // Re-targets every row's outcome from the stored stats.
  void set_target(Target t);
};

struct PrepareOptions {
  Target target = Target::goals;
  int drop_first = 2;
  int drop_last = 4;
  std::vector<std::string> regular_stage_labels{"regular", "regular season"};
};

struct PrepareLog {
  std::size_t input_fixtures = 0;
  std::size_t after_stage_filter = 0;
  std::size_t after_round_filter = 0;
  std::size_t analysis_rows = 0;
  std::vector<std::pair<std::string, std::pair<int, int>>> retained_rounds;  // partition -> [first, last]
};

// Stage filter -> strength features (on all regular fixtures) -> round filter
// -> grouping -> perspective expansion. Throws Error(unmapped_formation)
// listing every raw string the mapping does not cover.
AnalysisTable prepare_analysis(std::span<const Fixture> fixtures, const FormationMapping& mapping,
                               const PrepareOptions& options, PrepareLog* log = nullptr);

void write_analysis_table(const std::filesystem::path& path, const AnalysisTable& table);
AnalysisTable read_analysis_table(const std::filesystem::path& path, Target target);

}  // namespace fdml
