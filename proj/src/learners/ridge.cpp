#include <cmath>

#include "fdml/error.hpp"
#include "fdml/learners.hpp"

namespace fdml {

double RidgeModel::predict(const Eigen::MatrixXd& x, Eigen::Index row) const {
  return intercept + x.row(row).dot(coef);
}

RidgeModel fit_ridge(const Eigen::MatrixXd& x, std::span<const double> targets, std::span<const std::size_t> rows,
                     double lambda) {
  if (rows.empty()) throw Error(ErrorCode::dimension, "cannot fit ridge on zero rows");
  if (!(lambda >= 0)) throw Error(ErrorCode::validation, "ridge_lambda must be >= 0");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = x.cols();

  Eigen::MatrixXd xs(n, p);
  Eigen::VectorXd ys(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    xs.row(i) = x.row(r);
    ys(i) = targets[static_cast<std::size_t>(r)];
  }
  const Eigen::RowVectorXd x_mean = xs.colwise().mean();
  const double y_mean = ys.mean();
  xs.rowwise() -= x_mean;
  ys.array() -= y_mean;

  // least squares on [Xc; sqrt(lambda) I] keeps the lambda = 0 case well posed
  Eigen::MatrixXd a(n + p, p);
  a.topRows(n) = xs;
  a.bottomRows(p) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + p);
  b.head(n) = ys;

  RidgeModel model;
  model.coef = a.colPivHouseholderQr().solve(b);
  model.intercept = y_mean - x_mean.dot(model.coef);
  return model;
}

}  // namespace fdml
