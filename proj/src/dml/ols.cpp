#include <cmath>
#include <map>

#include "fdml/dml.hpp"
#include "fdml/error.hpp"

namespace fdml {

std::string_view se_variant_name(SeVariant v) noexcept {
  switch (v) {
    case SeVariant::hc0: return "HC0";
    case SeVariant::hc1: return "HC1";
    case SeVariant::hc3: return "HC3";
    case SeVariant::cluster: return "CR1";
  }
  return "HC1";
}

std::optional<SeVariant> parse_se_variant(std::string_view name) {
  if (name == "HC0" || name == "hc0") return SeVariant::hc0;
  if (name == "HC1" || name == "hc1") return SeVariant::hc1;
  if (name == "HC3" || name == "hc3") return SeVariant::hc3;
  if (name == "CR1" || name == "cr1" || name == "cluster") return SeVariant::cluster;
  return std::nullopt;
}

double normal_two_sided_p(double t) noexcept {
  if (std::isnan(t)) return 1.0;
  return std::erfc(std::abs(t) / std::sqrt(2.0));
}

OlsResult final_stage_ols(const ResidualSet& residuals, const OlsOptions& options) {
  const Eigen::Index n = residuals.r_y.size();
  const Eigen::Index p = residuals.r_d.cols();
  if (residuals.r_d.rows() != n) throw Error(ErrorCode::dimension, "r_D rows differ from r_Y length");
  if (n <= p)
    throw Error(ErrorCode::rank_deficient, "final stage has " + std::to_string(n) + " rows for " + std::to_string(p) +
                                               " coefficients");

  const Eigen::VectorXd y = residuals.r_y.array() - residuals.r_y.mean();
  const Eigen::MatrixXd x = residuals.r_d.rowwise() - residuals.r_d.colwise().mean();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-9);
  if (qr.rank() < p) {
    std::string msg = "final-stage design has rank " + std::to_string(qr.rank()) + " < " + std::to_string(p) +
                      "; near-collinear columns:";
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < p; ++i) {
      const auto c = static_cast<std::size_t>(perm(i));
      msg += " ";
      msg += c < options.column_labels.size() ? options.column_labels[c] : "#" + std::to_string(c);
      if (c < options.column_counts.size()) msg += " (n=" + std::to_string(options.column_counts[c]) + ")";
    }
    throw Error(ErrorCode::rank_deficient, msg);
  }

  OlsResult out;
  out.coef = qr.solve(y);

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd bread = perm * inner * perm.transpose();

  const Eigen::VectorXd e = y - x * out.coef;
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  const double dof = static_cast<double>(n - p);
  switch (options.variant) {
    case SeVariant::hc0:
    case SeVariant::hc1: {
      const Eigen::MatrixXd xe = x.array().colwise() * e.array();
      meat = xe.transpose() * xe;
      if (options.variant == SeVariant::hc1) meat *= static_cast<double>(n) / dof;
      break;
    }
    case SeVariant::hc3: {
      const Eigen::VectorXd h = ((x * bread).array() * x.array()).rowwise().sum();
      const Eigen::ArrayXd w = e.array() / (1.0 - h.array());
      const Eigen::MatrixXd xe = x.array().colwise() * w;
      meat = xe.transpose() * xe;
      break;
    }
    case SeVariant::cluster: {
      if (static_cast<Eigen::Index>(residuals.cluster.size()) != n)
        throw Error(ErrorCode::dimension, "cluster ids missing for the CR1 variance");
      std::map<int, Eigen::VectorXd> scores;
      for (Eigen::Index i = 0; i < n; ++i) {
        auto [it, inserted] = scores.try_emplace(residuals.cluster[static_cast<std::size_t>(i)], Eigen::VectorXd::Zero(p));
        it->second += x.row(i).transpose() * e(i);
      }
      for (const auto& [id, s] : scores) meat += s * s.transpose();
      const auto g = static_cast<double>(scores.size());
      if (g > 1) meat *= g / (g - 1.0) * (static_cast<double>(n) - 1.0) / dof;
      break;
    }
  }
  out.cov = bread * meat * bread;
  out.se = out.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  out.t.resize(p);
  out.p.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double b = out.coef(j), s = out.se(j);
    if (s > 0) {
      out.t(j) = b / s;
    } else {
      out.t(j) = b == 0 ? 0.0 : std::copysign(INFINITY, b);
    }
    out.p(j) = normal_two_sided_p(out.t(j));
  }
  return out;
}

}  // namespace fdml
