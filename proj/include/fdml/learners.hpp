#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace fdml {

inline constexpr int kMaxTreeDepth = 5;

enum class LearnerKind { boosted_trees, ridge };

std::string_view learner_name(LearnerKind kind) noexcept;
std::optional<LearnerKind> parse_learner(std::string_view name);

struct LearnerParams {
  int max_depth = 3;
  int n_stages = 100;
  double learning_rate = 0.1;
  int min_samples_leaf = 20;
  double subsample_fraction = 0.8;
  double ridge_lambda = 1.0;
  std::uint64_t seed = 0;
};

struct RegressorSpec {
  LearnerKind kind = LearnerKind::boosted_trees;
  LearnerParams params;

  // Throws Error(validation); depth must be in 1..kMaxTreeDepth.
  void validate() const;
};

struct FitReport {
  double mse = 0;
  std::optional<double> r2;  // nullopt when the target is constant
};

FitReport evaluate_predictions(std::span<const double> y, std::span<const double> predictions);

// Feature matrix plus a lossless per-column rank encoding (index of each
// value among the column's sorted distinct values). Built once and shared
// by every model fitted on the same data.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Eigen::MatrixXd x);

  const Eigen::MatrixXd& x() const noexcept { return x_; }
  Eigen::Index rows() const noexcept { return x_.rows(); }
  Eigen::Index cols() const noexcept { return x_.cols(); }

  std::span<const std::uint32_t> ranks(Eigen::Index col) const { return ranks_[static_cast<std::size_t>(col)]; }
  std::span<const double> distinct(Eigen::Index col) const { return distinct_[static_cast<std::size_t>(col)]; }
  // Two-valued columns only: rows holding the larger value, ascending.
  std::span<const std::uint32_t> upper_rows(Eigen::Index col) const {
    return upper_rows_[static_cast<std::size_t>(col)];
  }
  // Columns with more than two values, and their ranks laid out row-major as
  // offsets into one concatenated range of dense_bins() slots.
  std::span<const Eigen::Index> dense_columns() const noexcept { return dense_cols_; }
  std::span<const std::size_t> dense_offsets() const noexcept { return dense_offsets_; }
  std::size_t dense_bins() const noexcept { return dense_bins_; }
  std::span<const std::uint32_t> dense_codes(Eigen::Index row) const {
    return {dense_codes_.data() + static_cast<std::size_t>(row) * dense_cols_.size(), dense_cols_.size()};
  }

 private:
  Eigen::MatrixXd x_;
  std::vector<std::vector<std::uint32_t>> ranks_;
  std::vector<std::vector<double>> distinct_;
  std::vector<std::vector<std::uint32_t>> upper_rows_;
  std::vector<Eigen::Index> dense_cols_;
  std::vector<std::size_t> dense_offsets_;
  std::size_t dense_bins_ = 0;
  std::vector<std::uint32_t> dense_codes_;
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0;  // go left when x <= threshold
  int left = -1;
  int right = -1;
  int depth = 0;
  double value = 0;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(const Eigen::MatrixXd& x, Eigen::Index row) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  // Longest root-to-leaf path in edges.
  int depth() const;
  std::size_t leaf_count() const;

 private:
  std::vector<TreeNode> nodes_;
};

// Squared-error tree on the given training rows of `features`; `targets` is
// indexed by global row. Leaves predict the mean of their targets.
RegressionTree fit_regression_tree(const FeatureMatrix& features, std::span<const double> targets,
                                   std::span<const std::size_t> rows, const LearnerParams& params);
RegressionTree fit_regression_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LearnerParams& params);

class BoostedModel {
 public:
  double init = 0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;
  // Training MSE before any stage, then after each stage.
  std::vector<double> training_mse;

  double predict(const Eigen::MatrixXd& x, Eigen::Index row) const;
};

BoostedModel fit_gradient_boosting(const FeatureMatrix& features, std::span<const double> targets,
                                   std::span<const std::size_t> rows, const LearnerParams& params);
BoostedModel fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LearnerParams& params);

class RidgeModel {
 public:
  double intercept = 0;
  Eigen::VectorXd coef;

  double predict(const Eigen::MatrixXd& x, Eigen::Index row) const;
};

// Intercept unpenalized; lambda = 0 is ordinary least squares.
RidgeModel fit_ridge(const Eigen::MatrixXd& x, std::span<const double> targets, std::span<const std::size_t> rows,
                     double lambda);

class Regressor {
 public:
  Regressor() = default;
  explicit Regressor(BoostedModel m) : model_(std::move(m)) {}
  explicit Regressor(RidgeModel m) : model_(std::move(m)) {}

  double predict(const Eigen::MatrixXd& x, Eigen::Index row) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
  const BoostedModel* boosted() const { return std::get_if<BoostedModel>(&model_); }
  const RidgeModel* ridge() const { return std::get_if<RidgeModel>(&model_); }

  // Text dump of every stage tree (or ridge coefficients); for debugging only.
  std::string dump() const;

 private:
  std::variant<BoostedModel, RidgeModel> model_;
};

Regressor fit_regressor(const RegressorSpec& spec, const FeatureMatrix& features, std::span<const double> targets,
                        std::span<const std::size_t> rows);

FitReport evaluate(const Regressor& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

enum class Schedule { serial, parallel };

struct TuneResult {
  RegressorSpec best;
  FitReport report;  // cross-validated: mean fold MSE, pooled out-of-fold R^2
  std::vector<double> mean_neg_mse;  // per grid candidate
};

// Picks the candidate with the highest mean validation -MSE. Ties go to
// fewer stages, then shallower depth, then grid order. Every candidate is
// validated before anything is fitted.
TuneResult tune(LearnerKind kind, std::span<const LearnerParams> grid, const FeatureMatrix& features,
                std::span<const double> targets, int n_folds, std::uint64_t seed, Schedule schedule = Schedule::parallel);

// depth {2,3,5} x learning rate {0.05, 0.1} x stages {100, 300}
std::vector<LearnerParams> default_boosting_grid();

// Mixes a base seed with a task index (splitmix64) so every independent fit
// has its own stream regardless of execution order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t task) noexcept;

// Fold id per row after a seeded shuffle; fold sizes differ by at most one.
std::vector<int> kfold_assignment(std::size_t n, int n_folds, std::uint64_t seed);

}  // namespace fdml
