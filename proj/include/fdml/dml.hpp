#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fdml/analysis.hpp"
#include "fdml/encoding.hpp"
#include "fdml/grid.hpp"
#include "fdml/learners.hpp"

namespace fdml {

enum class SeVariant { hc0, hc1, hc3, cluster };

std::string_view se_variant_name(SeVariant v) noexcept;
std::optional<SeVariant> parse_se_variant(std::string_view name);

struct RunConfig {
  Target target = Target::goals;
  int n_folds = 5;
  std::uint64_t seed = 20240917;
  RegressorSpec learner;
  SeVariant se_variant = SeVariant::hc1;
  EncodingSpec encoding;
  Schedule schedule = Schedule::parallel;
  // Tune the outcome learner on negative MSE before cross-fitting.
  bool tune_outcome = false;
  std::vector<LearnerParams> tuning_grid;  // empty: default_boosting_grid()
  int tuning_folds = 3;
  // run_pipeline refuses fewer than this many rows per fold.
  int min_rows_per_fold = 10;

  void validate() const;
};

struct FirstStageReport {
  std::string name;  // "Y" or a cell label like "(2,5)"
  FitReport report;  // out-of-fold
};

struct ResidualSet {
  Eigen::VectorXd r_y;
  Eigen::MatrixXd r_d;
  std::vector<int> fold;
  std::vector<int> cluster;  // dense fixture index, shared by both perspectives
  std::vector<FirstStageReport> first_stage;  // Y first, then design columns
};

// Fold ids over groups: all rows sharing a group id land in the same fold;
// group counts per fold differ by at most one.
std::vector<int> assign_group_folds(std::span<const std::string> group_ids, int n_folds, std::uint64_t seed);

struct CrossFitOptions {
  int n_folds = 5;
  std::uint64_t seed = 0;
  RegressorSpec outcome_learner;
  RegressorSpec treatment_learner;
  Schedule schedule = Schedule::parallel;
};

// Out-of-fold residuals for the outcome and every design column. Each
// (fold, column) fit is an independent task with its own derived seed, so
// serial and parallel schedules give bit-identical results.
ResidualSet cross_fit_residuals(const FeatureMatrix& features, const Eigen::VectorXd& y,
                                const EffectCodedMatrix& design, std::span<const std::string> group_ids,
                                const CrossFitOptions& options);

struct OlsResult {
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;
  Eigen::VectorXd se;
  Eigen::VectorXd t;
  Eigen::VectorXd p;
};

struct OlsOptions {
  SeVariant variant = SeVariant::hc1;
  std::vector<std::string> column_labels;  // used in rank errors
  std::vector<long> column_counts;
};

// Intercept-free regression of centered r_Y on centered r_D columns, robust
// sandwich covariance, two-sided normal p-values. Throws
// Error(rank_deficient) naming the dependent columns.
OlsResult final_stage_ols(const ResidualSet& residuals, const OlsOptions& options = {});

// Two-sided p-value against the standard normal.
double normal_two_sided_p(double t) noexcept;

// "***" p<0.001, "**" p<0.01, "*" p<0.05, "ns" otherwise.
std::string_view significance_stars(double p) noexcept;

struct BetaMatrix {
  int k = 0;
  SquareGrid<double> beta;  // raw estimates, diagonal included
  SquareGrid<double> se;
  SquareGrid<double> p;
  SquareGrid<std::string> stars;
  SquareGrid<long> cell_counts;
  TreatmentCell omitted;
  double home_effect = 0;

  // beta with the diagonal shown as zero.
  SquareGrid<double> displayed() const;
  std::vector<double> raw_diagonal() const;
  // max |beta(i,j) + beta(j,i)| over i != j
  double antisymmetry_gap() const;
};

BetaMatrix assemble_matrix(const Eigen::VectorXd& coef, const Eigen::MatrixXd& cov, const EncodingSpec& spec,
                           double home_effect, const SquareGrid<long>& cell_counts = {});

// Mean outcome over home-perspective rows; throws Error(no_home_rows).
double estimate_home_effect(std::span<const AnalysisRow> rows);

// Displayed grid shifted by the home effect; significance is untouched.
SquareGrid<double> side_adjust(const BetaMatrix& matrix);

struct OrthogonalityEntry {
  std::string residual;  // "Y" or cell label
  std::string confounder;
  double max_abs_corr = 0;
};

struct Diagnostics {
  SquareGrid<long> cell_counts;
  std::vector<FirstStageReport> first_stage;
  double antisymmetry_gap = 0;
  std::vector<double> raw_diagonal;
  std::vector<OrthogonalityEntry> orthogonality;  // one per residual vector, worst confounder
  double max_orthogonality = 0;
  std::optional<LearnerParams> tuned_outcome_params;
  std::optional<FitReport> tuning_report;
};

struct PipelineResult {
  BetaMatrix matrix;
  Diagnostics diagnostics;
  ResidualSet residuals;
  OlsResult ols;
};

// encoding -> cross-fit -> final OLS -> matrix assembly.
PipelineResult run_pipeline(const AnalysisTable& table, const RunConfig& config);

SquareGrid<long> count_cells(std::span<const AnalysisRow> rows, int k);

// Baseline without residualization: per-cell mean outcome minus the
// unweighted mean of all cell means, with its standard error.
struct NaiveEstimate {
  SquareGrid<double> beta;
  SquareGrid<double> se;
};
NaiveEstimate naive_cell_estimates(std::span<const AnalysisRow> rows, int k);

// max |corr(x, r)| over confounder columns x.
double max_abs_correlation(const Eigen::MatrixXd& x, const Eigen::VectorXd& r, Eigen::Index* worst = nullptr);

}  // namespace fdml
