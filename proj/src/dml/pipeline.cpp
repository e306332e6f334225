#include <set>

#include "fdml/dml.hpp"
#include "fdml/error.hpp"
#include "fdml/formation.hpp"

namespace fdml {

void RunConfig::validate() const {
  if (n_folds < 2)
    throw Error(ErrorCode::validation, "cross-fitting needs n_folds >= 2, got " + std::to_string(n_folds));
  if (tune_outcome && tuning_folds < 2) throw Error(ErrorCode::validation, "tuning_folds must be >= 2");
  learner.validate();
  encoding.validate();
}

namespace {

std::string cell_label(TreatmentCell c, int k) {
  if (k == kGroupCount)
    return std::string(FormationGroup::from_index(c.main).label()) + " v " +
           std::string(FormationGroup::from_index(c.rival).label());
  return to_string(c);
}

std::vector<LearnerParams> default_ridge_grid() {
  std::vector<LearnerParams> grid;
  for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    LearnerParams p;
    p.ridge_lambda = lambda;
    grid.push_back(p);
  }
  return grid;
}

}  // namespace

PipelineResult run_pipeline(const AnalysisTable& table, const RunConfig& config) {
  config.validate();
  const auto& rows = table.rows;
  const int k = config.encoding.k;
  if (rows.size() < static_cast<std::size_t>(config.n_folds) * static_cast<std::size_t>(config.min_rows_per_fold))
    throw Error(ErrorCode::validation, "need at least " + std::to_string(config.min_rows_per_fold) +
                                           " rows per fold; have " + std::to_string(rows.size()) + " rows for " +
                                           std::to_string(config.n_folds) + " folds");

  std::vector<TreatmentCell> cells;
  cells.reserve(rows.size());
  std::set<TreatmentCell> distinct;
  for (const auto& r : rows) {
    cells.push_back(r.cell);
    distinct.insert(r.cell);
  }
  if (distinct.size() < 2) throw Error(ErrorCode::validation, "need at least two distinct treatment cells");

  const EffectCodedMatrix design = build_effect_coded_matrix(cells, config.encoding);
  PipelineResult result;
  result.diagnostics.cell_counts = count_cells(rows, k);

  const FeatureMatrix features(table.confounder_matrix());
  const Eigen::VectorXd y = table.outcomes();
  const auto ids = table.fixture_ids();

  CrossFitOptions cf;
  cf.n_folds = config.n_folds;
  cf.seed = config.seed;
  cf.outcome_learner = config.learner;
  cf.treatment_learner = config.learner;
  cf.schedule = config.schedule;

  if (config.tune_outcome) {
    std::vector<LearnerParams> grid = config.tuning_grid;
    if (grid.empty())
      grid = config.learner.kind == LearnerKind::ridge ? default_ridge_grid() : default_boosting_grid();
    const TuneResult tuned = tune(config.learner.kind, grid, features,
                                  {y.data(), static_cast<std::size_t>(y.size())}, config.tuning_folds,
                                  derive_seed(config.seed, 0x7475), config.schedule);
    cf.outcome_learner = tuned.best;
    result.diagnostics.tuned_outcome_params = tuned.best.params;
    result.diagnostics.tuning_report = tuned.report;
  }

  result.residuals = cross_fit_residuals(features, y, design, ids, cf);

  OlsOptions ols_options;
  ols_options.variant = config.se_variant;
  for (const auto& c : design.columns) {
    ols_options.column_labels.push_back(cell_label(c, k));
    ols_options.column_counts.push_back(result.diagnostics.cell_counts.at(c));
  }
  result.ols = final_stage_ols(result.residuals, ols_options);

  const double home = estimate_home_effect(rows);
  result.matrix = assemble_matrix(result.ols.coef, result.ols.cov, design.spec, home, result.diagnostics.cell_counts);

  auto& d = result.diagnostics;
  d.first_stage = result.residuals.first_stage;
  d.antisymmetry_gap = result.matrix.antisymmetry_gap();
  d.raw_diagonal = result.matrix.raw_diagonal();
  auto add_orth = [&](const std::string& name, const Eigen::VectorXd& r) {
    Eigen::Index worst = -1;
    const double c = max_abs_correlation(features.x(), r, &worst);
    d.orthogonality.push_back(
        {name, worst >= 0 && static_cast<std::size_t>(worst) < table.layout.names.size() ? table.layout.names[static_cast<std::size_t>(worst)] : std::string{"-"}, c});
    d.max_orthogonality = std::max(d.max_orthogonality, c);
  };
  add_orth("Y", result.residuals.r_y);
  for (std::size_t j = 0; j < design.columns.size(); ++j)
    add_orth(to_string(design.columns[j]), result.residuals.r_d.col(static_cast<Eigen::Index>(j)));
  return result;
}

}  // namespace fdml
