#include <algorithm>
#include <numeric>
#include <random>

#include "fdml/error.hpp"
#include "fdml/learners.hpp"

namespace fdml {

double BoostedModel::predict(const Eigen::MatrixXd& x, Eigen::Index row) const {
  double sum = 0;
  for (const auto& t : trees) sum += t.predict(x, row);
  return init + learning_rate * sum;
}

BoostedModel fit_gradient_boosting(const FeatureMatrix& features, std::span<const double> targets,
                                   std::span<const std::size_t> rows, const LearnerParams& params) {
  if (rows.empty()) throw Error(ErrorCode::dimension, "cannot fit boosting on zero rows");
  if (params.n_stages < 0) throw Error(ErrorCode::validation, "n_stages must be >= 0");
  if (!(params.learning_rate > 0 && params.learning_rate <= 1))
    throw Error(ErrorCode::validation, "learning_rate must be in (0, 1]");
  if (!(params.subsample_fraction > 0 && params.subsample_fraction <= 1))
    throw Error(ErrorCode::validation, "subsample_fraction must be in (0, 1]");

  const std::size_t n = rows.size();
  const Eigen::MatrixXd& x = features.x();

  BoostedModel model;
  model.learning_rate = params.learning_rate;
  double mean = 0;
  for (auto r : rows) mean += targets[r];
  mean /= static_cast<double>(n);
  model.init = mean;

  std::vector<double> fitted(n, mean);
  std::vector<double> residual(targets.size(), 0.0);
  auto training_mse = [&] {
    double s = 0;
    for (std::size_t p = 0; p < n; ++p) {
      const double e = targets[rows[p]] - fitted[p];
      s += e * e;
    }
    return s / static_cast<double>(n);
  };
  model.training_mse.push_back(training_mse());

  const bool subsample = params.subsample_fraction < 1.0;
  const std::size_t draw =
      subsample ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.subsample_fraction * n))) : n;
  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> pool;
  std::vector<std::size_t> sample;
  std::vector<char> chosen;
  if (subsample) {
    pool.assign(rows.begin(), rows.end());
    sample.reserve(draw);
    chosen.assign(targets.size(), 0);
  }

  model.trees.reserve(static_cast<std::size_t>(params.n_stages));
  for (int stage = 0; stage < params.n_stages; ++stage) {
    for (std::size_t p = 0; p < n; ++p) residual[rows[p]] = targets[rows[p]] - fitted[p];

    std::span<const std::size_t> fit_rows = rows;
    if (subsample) {
      // partial Fisher-Yates over the pool; the sample keeps the order of `rows`
      for (std::size_t i = 0; i < draw; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
        chosen[pool[i]] = 1;
      }
      sample.clear();
      for (auto r : rows)
        if (chosen[r]) {
          sample.push_back(r);
          chosen[r] = 0;
        }
      fit_rows = sample;
    }

    RegressionTree tree = fit_regression_tree(features, residual, fit_rows, params);
    for (std::size_t p = 0; p < n; ++p)
      fitted[p] += params.learning_rate * tree.predict(x, static_cast<Eigen::Index>(rows[p]));
    model.trees.push_back(std::move(tree));
    model.training_mse.push_back(training_mse());
  }
  return model;
}

BoostedModel fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LearnerParams& params) {
  if (x.rows() != y.size() || x.rows() == 0)
    throw Error(ErrorCode::dimension, "X has " + std::to_string(x.rows()) + " rows, y has " + std::to_string(y.size()));
  FeatureMatrix fm(x);
  std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_gradient_boosting(fm, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), rows,
                               params);
}

}  // namespace fdml
