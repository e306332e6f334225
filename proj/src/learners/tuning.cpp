#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>

#include "fdml/error.hpp"
#include "fdml/learners.hpp"

namespace fdml {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t task) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (task + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<int> kfold_assignment(std::size_t n, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw Error(ErrorCode::validation, "need at least 2 folds, got " + std::to_string(n_folds));
  if (static_cast<std::size_t>(n_folds) > n)
    throw Error(ErrorCode::validation, "more folds (" + std::to_string(n_folds) + ") than rows (" + std::to_string(n) + ")");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(n_folds));
  return fold;
}

std::vector<LearnerParams> default_boosting_grid() {
  std::vector<LearnerParams> grid;
  for (int depth : {2, 3, 5})
    for (double lr : {0.05, 0.1})
      for (int stages : {100, 300}) {
        LearnerParams p;
        p.max_depth = depth;
        p.learning_rate = lr;
        p.n_stages = stages;
        p.min_samples_leaf = 20;
        p.subsample_fraction = 0.8;
        grid.push_back(p);
      }
  return grid;
}

TuneResult tune(LearnerKind kind, std::span<const LearnerParams> grid, const FeatureMatrix& features,
                std::span<const double> targets, int n_folds, std::uint64_t seed, Schedule schedule) {
  if (grid.empty()) throw Error(ErrorCode::validation, "tuning grid is empty");
  for (const auto& p : grid) RegressorSpec{kind, p}.validate();
  const auto n = static_cast<std::size_t>(features.rows());
  if (targets.size() != n) throw Error(ErrorCode::dimension, "target length differs from feature rows");

  const auto fold = kfold_assignment(n, n_folds, seed);
  std::vector<std::vector<std::size_t>> train(static_cast<std::size_t>(n_folds)), test(static_cast<std::size_t>(n_folds));
  for (std::size_t i = 0; i < n; ++i)
    for (int f = 0; f < n_folds; ++f) (fold[i] == f ? test : train)[static_cast<std::size_t>(f)].push_back(i);

  const std::size_t n_candidates = grid.size();
  const auto folds = static_cast<std::size_t>(n_folds);
  const std::size_t n_tasks = n_candidates * folds;
  std::vector<double> fold_mse(n_tasks, 0.0);
  std::vector<std::vector<double>> oof(n_candidates, std::vector<double>(n, 0.0));

  auto run_task = [&](std::size_t task) {
    const std::size_t c = task / folds;
    const std::size_t f = task % folds;
    RegressorSpec spec{kind, grid[c]};
    spec.params.seed = derive_seed(seed, task);
    const Regressor model = fit_regressor(spec, features, targets, train[f]);
    double sse = 0;
    for (auto r : test[f]) {
      const double pred = model.predict(features.x(), static_cast<Eigen::Index>(r));
      oof[c][r] = pred;
      sse += (targets[r] - pred) * (targets[r] - pred);
    }
    fold_mse[task] = sse / static_cast<double>(test[f].size());
  };

  if (schedule == Schedule::parallel) {
    const auto total = static_cast<std::int64_t>(n_tasks);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < total; ++t) run_task(static_cast<std::size_t>(t));
  } else {
    for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
  }

  TuneResult result;
  result.mean_neg_mse.resize(n_candidates);
  for (std::size_t c = 0; c < n_candidates; ++c) {
    double s = 0;
    for (std::size_t f = 0; f < folds; ++f) s += fold_mse[c * folds + f];
    result.mean_neg_mse[c] = -s / static_cast<double>(folds);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < n_candidates; ++c) {
    const double a = result.mean_neg_mse[c], b = result.mean_neg_mse[best];
    if (a > b) {
      best = c;
    } else if (a == b && std::tie(grid[c].n_stages, grid[c].max_depth) < std::tie(grid[best].n_stages, grid[best].max_depth)) {
      best = c;
    }
  }
  result.best = RegressorSpec{kind, grid[best]};
  result.report = evaluate_predictions(targets, oof[best]);
  result.report.mse = -result.mean_neg_mse[best];
  return result;
}

}  // namespace fdml
