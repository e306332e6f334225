#include <cmath>
#include <sstream>

#include "fdml/error.hpp"
#include "fdml/learners.hpp"
#include "fdml/text_io.hpp"

namespace fdml {

std::string_view learner_name(LearnerKind kind) noexcept {
  return kind == LearnerKind::ridge ? "ridge" : "boosted";
}

std::optional<LearnerKind> parse_learner(std::string_view name) {
  if (name == "boosted" || name == "boosted-trees" || name == "boosted_trees") return LearnerKind::boosted_trees;
  if (name == "ridge") return LearnerKind::ridge;
  return std::nullopt;
}

void RegressorSpec::validate() const {
  const auto& p = params;
  if (kind == LearnerKind::ridge) {
    if (!(p.ridge_lambda >= 0)) throw Error(ErrorCode::validation, "ridge_lambda must be >= 0");
    return;
  }
  if (p.max_depth < 1 || p.max_depth > kMaxTreeDepth)
    throw Error(ErrorCode::validation, "max_depth must be in 1.." + std::to_string(kMaxTreeDepth) + ", got " +
                                           std::to_string(p.max_depth));
  if (p.n_stages < 0) throw Error(ErrorCode::validation, "n_stages must be >= 0");
  if (!(p.learning_rate > 0 && p.learning_rate <= 1))
    throw Error(ErrorCode::validation, "learning_rate must be in (0, 1]");
  if (p.min_samples_leaf < 1) throw Error(ErrorCode::validation, "min_samples_leaf must be >= 1");
  if (!(p.subsample_fraction > 0 && p.subsample_fraction <= 1))
    throw Error(ErrorCode::validation, "subsample_fraction must be in (0, 1]");
}

double Regressor::predict(const Eigen::MatrixXd& x, Eigen::Index row) const {
  return std::visit([&](const auto& m) { return m.predict(x, row); }, model_);
}

Eigen::VectorXd Regressor::predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict(x, i);
  return out;
}

std::string Regressor::dump() const {
  std::ostringstream out;
  if (const auto* r = ridge()) {
    out << "ridge intercept=" << format_double(r->intercept) << '\n';
    for (Eigen::Index j = 0; j < r->coef.size(); ++j) out << "  x" << j << " " << format_double(r->coef(j)) << '\n';
    return out.str();
  }
  const auto* b = boosted();
  out << "boosted init=" << format_double(b->init) << " lr=" << format_double(b->learning_rate)
      << " stages=" << b->trees.size() << '\n';
  for (std::size_t s = 0; s < b->trees.size(); ++s) {
    out << "stage " << s << '\n';
    const auto& nodes = b->trees[s].nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      out << std::string(static_cast<std::size_t>(2 + 2 * n.depth), ' ') << '#' << i;
      if (n.feature < 0)
        out << " leaf " << format_double(n.value) << '\n';
      else
        out << " x" << n.feature << " <= " << format_double(n.threshold) << " ? #" << n.left << " : #" << n.right
            << '\n';
    }
  }
  return out.str();
}

Regressor fit_regressor(const RegressorSpec& spec, const FeatureMatrix& features, std::span<const double> targets,
                        std::span<const std::size_t> rows) {
  spec.validate();
  if (spec.kind == LearnerKind::ridge) return Regressor(fit_ridge(features.x(), targets, rows, spec.params.ridge_lambda));
  return Regressor(fit_gradient_boosting(features, targets, rows, spec.params));
}

FitReport evaluate_predictions(std::span<const double> y, std::span<const double> predictions) {
  if (y.size() != predictions.size() || y.empty())
    throw Error(ErrorCode::dimension, "evaluate: y and predictions differ in length or are empty");
  const auto n = static_cast<double>(y.size());
  double mean = 0;
  for (double v : y) mean += v;
  mean /= n;
  double sse = 0, sst = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sse += (y[i] - predictions[i]) * (y[i] - predictions[i]);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  FitReport report;
  report.mse = sse / n;
  if (sst > 0) report.r2 = 1.0 - sse / sst;
  return report;
}

FitReport evaluate(const Regressor& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::dimension, "evaluate: X and y row counts differ");
  const Eigen::VectorXd pred = model.predict(x);
  return evaluate_predictions(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                              std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())));
}

}  // namespace fdml
