#include <cmath>
#include <limits>

#include "fdml/dml.hpp"
#include "fdml/error.hpp"

namespace fdml {

std::string_view significance_stars(double p) noexcept {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "ns";
}

SquareGrid<double> BetaMatrix::displayed() const {
  SquareGrid<double> out = beta;
  for (int i = 0; i < k; ++i) out(i, i) = 0.0;
  return out;
}

std::vector<double> BetaMatrix::raw_diagonal() const {
  std::vector<double> d;
  for (int i = 0; i < k; ++i) d.push_back(beta(i, i));
  return d;
}

double BetaMatrix::antisymmetry_gap() const {
  double gap = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) gap = std::max(gap, std::abs(beta(i, j) + beta(j, i)));
  return gap;
}

BetaMatrix assemble_matrix(const Eigen::VectorXd& coef, const Eigen::MatrixXd& cov, const EncodingSpec& spec,
                           double home_effect, const SquareGrid<long>& cell_counts) {
  spec.validate();
  const auto columns = spec.columns();
  const auto m = static_cast<Eigen::Index>(columns.size());
  if (coef.size() != m || cov.rows() != m || cov.cols() != m)
    throw Error(ErrorCode::dimension, "expected " + std::to_string(m) + " coefficients for k=" + std::to_string(spec.k));

  BetaMatrix out;
  out.k = spec.k;
  out.beta = SquareGrid<double>(spec.k, 0.0);
  out.se = SquareGrid<double>(spec.k, 0.0);
  out.p = SquareGrid<double>(spec.k, 1.0);
  out.stars = SquareGrid<std::string>(spec.k, "ns");
  out.cell_counts = cell_counts.k() == spec.k ? cell_counts : SquareGrid<long>(spec.k, 0);
  out.omitted = spec.reference();
  out.home_effect = home_effect;

  auto set_cell = [&](TreatmentCell c, double b, double s) {
    out.beta.at(c) = b;
    out.se.at(c) = s;
    const double t = s > 0 ? b / s : (b == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b));
    out.p.at(c) = normal_two_sided_p(t);
    out.stars.at(c) = std::string(significance_stars(out.p.at(c)));
  };

  for (Eigen::Index j = 0; j < m; ++j)
    set_cell(columns[static_cast<std::size_t>(j)], coef(j), std::sqrt(std::max(0.0, cov(j, j))));

  // delta method: Var(-sum b) = 1' V 1
  const double omitted_var = cov.sum();
  set_cell(out.omitted, recover_omitted_beta({coef.data(), static_cast<std::size_t>(m)}),
           std::sqrt(std::max(0.0, omitted_var)));
  return out;
}

double estimate_home_effect(std::span<const AnalysisRow> rows) {
  double sum = 0;
  std::size_t count = 0;
  for (const auto& r : rows)
    if (r.is_home) {
      sum += r.outcome;
      ++count;
    }
  if (count == 0) throw Error(ErrorCode::no_home_rows, "no home-perspective rows to estimate the home effect");
  return sum / static_cast<double>(count);
}

SquareGrid<double> side_adjust(const BetaMatrix& matrix) {
  SquareGrid<double> out = matrix.displayed();
  for (int i = 0; i < matrix.k; ++i)
    for (int j = 0; j < matrix.k; ++j) out(i, j) += matrix.home_effect;
  return out;
}

SquareGrid<long> count_cells(std::span<const AnalysisRow> rows, int k) {
  SquareGrid<long> counts(k, 0);
  for (const auto& r : rows) {
    if (r.cell.main < 1 || r.cell.main > k || r.cell.rival < 1 || r.cell.rival > k)
      throw Error(ErrorCode::validation, "cell " + to_string(r.cell) + " outside 1.." + std::to_string(k));
    ++counts.at(r.cell);
  }
  return counts;
}

NaiveEstimate naive_cell_estimates(std::span<const AnalysisRow> rows, int k) {
  SquareGrid<double> sum(k, 0.0), sumsq(k, 0.0);
  SquareGrid<long> n(k, 0);
  for (const auto& r : rows) {
    sum.at(r.cell) += r.outcome;
    sumsq.at(r.cell) += r.outcome * r.outcome;
    ++n.at(r.cell);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SquareGrid<double> mean(k, nan), s2(k, nan);
  double grand = 0, total_s2 = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const auto c = static_cast<double>(n(i, j));
      if (n(i, j) == 0) continue;
      mean(i, j) = sum(i, j) / c;
      const double var = n(i, j) > 1 ? (sumsq(i, j) - c * mean(i, j) * mean(i, j)) / (c - 1) : 0.0;
      s2(i, j) = std::max(0.0, var) / c;
      grand += mean(i, j);
      total_s2 += s2(i, j);
    }
  const double kk = static_cast<double>(k * k);
  grand /= kk;
  NaiveEstimate out{SquareGrid<double>(k, nan), SquareGrid<double>(k, nan)};
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (n(i, j) == 0) continue;
      out.beta(i, j) = mean(i, j) - grand;
      out.se(i, j) = std::sqrt(s2(i, j) * (1.0 - 2.0 / kk) + total_s2 / (kk * kk));
    }
  return out;
}

double max_abs_correlation(const Eigen::MatrixXd& x, const Eigen::VectorXd& r, Eigen::Index* worst) {
  const Eigen::VectorXd rc = r.array() - r.mean();
  const double rn = rc.norm();
  double best = 0;
  Eigen::Index arg = -1;
  if (rn == 0) {
    if (worst) *worst = arg;
    return 0.0;
  }
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd xc = x.col(j).array() - x.col(j).mean();
    const double xn = xc.norm();
    if (xn == 0) continue;
    const double c = std::abs(xc.dot(rc)) / (xn * rn);
    if (c > best) {
      best = c;
      arg = j;
    }
  }
  if (worst) *worst = arg;
  return best;
}

}  // namespace fdml
