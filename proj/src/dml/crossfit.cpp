#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "fdml/dml.hpp"
#include "fdml/error.hpp"

namespace fdml {

std::vector<int> assign_group_folds(std::span<const std::string> group_ids, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error(ErrorCode::validation, "cross-fitting needs at least 2 folds, got " + std::to_string(n_folds));
  std::map<std::string_view, std::size_t> index;
  std::vector<std::size_t> group_of(group_ids.size());
  for (std::size_t i = 0; i < group_ids.size(); ++i) {
    auto [it, inserted] = index.try_emplace(group_ids[i], index.size());
    group_of[i] = it->second;
  }
  const std::size_t n_groups = index.size();
  if (n_groups < static_cast<std::size_t>(n_folds))
    throw Error(ErrorCode::validation, "fewer groups (" + std::to_string(n_groups) + ") than folds (" +
                                           std::to_string(n_folds) + ")");
  std::vector<std::size_t> perm(n_groups);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> group_fold(n_groups);
  for (std::size_t p = 0; p < n_groups; ++p)
    group_fold[perm[p]] = static_cast<int>(p % static_cast<std::size_t>(n_folds));
  std::vector<int> fold(group_ids.size());
  for (std::size_t i = 0; i < group_ids.size(); ++i) fold[i] = group_fold[group_of[i]];
  return fold;
}

ResidualSet cross_fit_residuals(const FeatureMatrix& features, const Eigen::VectorXd& y,
                                const EffectCodedMatrix& design, std::span<const std::string> group_ids,
                                const CrossFitOptions& options) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (static_cast<std::size_t>(y.size()) != n || static_cast<std::size_t>(design.values.rows()) != n ||
      group_ids.size() != n)
    throw Error(ErrorCode::dimension, "cross-fit inputs are not aligned row by row");
  options.outcome_learner.validate();
  options.treatment_learner.validate();

  ResidualSet out;
  out.fold = assign_group_folds(group_ids, options.n_folds, options.seed);
  {
    std::map<std::string_view, int> dense;
    out.cluster.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out.cluster[i] = dense.try_emplace(group_ids[i], static_cast<int>(dense.size())).first->second;
  }

  const auto folds = static_cast<std::size_t>(options.n_folds);
  std::vector<std::vector<std::size_t>> train(folds), test(folds);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < folds; ++f) (out.fold[i] == static_cast<int>(f) ? test : train)[f].push_back(i);

  const auto m = static_cast<std::size_t>(design.values.cols());
  for (std::size_t j = 0; j < m; ++j) {
    const double* col = design.values.col(static_cast<Eigen::Index>(j)).data();
    bool varies_somewhere = false;
    for (std::size_t f = 0; f < folds && !varies_somewhere; ++f) {
      const auto& tr = train[f];
      for (std::size_t q = 1; q < tr.size(); ++q)
        if (col[tr[q]] != col[tr[0]]) {
          varies_somewhere = true;
          break;
        }
    }
    if (!varies_somewhere)
      throw Error(ErrorCode::degenerate_column,
                  "treatment column for cell " + to_string(design.columns[j]) + " is constant in every training split");
  }

  // column 0 is the outcome, 1..m the design columns
  const std::size_t n_targets = m + 1;
  auto target_data = [&](std::size_t c) -> std::span<const double> {
    if (c == 0) return {y.data(), n};
    return {design.values.col(static_cast<Eigen::Index>(c - 1)).data(), n};
  };

  Eigen::MatrixXd predictions(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_targets));
  const std::size_t n_tasks = folds * n_targets;

  auto run_task = [&](std::size_t task) {
    const std::size_t f = task / n_targets;
    const std::size_t c = task % n_targets;
    RegressorSpec spec = c == 0 ? options.outcome_learner : options.treatment_learner;
    spec.params.seed = derive_seed(options.seed, task);
    const Regressor model = fit_regressor(spec, features, target_data(c), train[f]);
    for (auto r : test[f]) {
      const auto row = static_cast<Eigen::Index>(r);
      predictions(row, static_cast<Eigen::Index>(c)) = model.predict(features.x(), row);
    }
  };

  if (options.schedule == Schedule::parallel) {
    const auto total = static_cast<std::int64_t>(n_tasks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < total; ++t) run_task(static_cast<std::size_t>(t));
  } else {
    for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
  }

  out.r_y = y - predictions.col(0);
  out.r_d = design.values - predictions.rightCols(static_cast<Eigen::Index>(m));
  out.first_stage.reserve(n_targets);
  for (std::size_t c = 0; c < n_targets; ++c) {
    const Eigen::VectorXd pred = predictions.col(static_cast<Eigen::Index>(c));
    FirstStageReport rep;
    rep.name = c == 0 ? "Y" : to_string(design.columns[c - 1]);
    rep.report = evaluate_predictions(target_data(c), {pred.data(), n});
    out.first_stage.push_back(std::move(rep));
  }
  return out;
}

}  // namespace fdml
