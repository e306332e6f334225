#include <algorithm>
#include <cmath>
#include <numeric>

#include "fdml/error.hpp"
#include "fdml/learners.hpp"

namespace fdml {

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd x) : x_(std::move(x)) {
  const auto n = static_cast<std::size_t>(x_.rows());
  ranks_.resize(static_cast<std::size_t>(x_.cols()));
  distinct_.resize(static_cast<std::size_t>(x_.cols()));
  upper_rows_.resize(static_cast<std::size_t>(x_.cols()));
  std::vector<std::size_t> order(n);
  for (Eigen::Index c = 0; c < x_.cols(); ++c) {
    const double* col = x_.col(c).data();
    for (std::size_t i = 0; i < n; ++i)
      if (std::isnan(col[i])) throw Error(ErrorCode::validation, "feature column " + std::to_string(c) + " has NaN");
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    auto& ranks = ranks_[static_cast<std::size_t>(c)];
    auto& distinct = distinct_[static_cast<std::size_t>(c)];
    ranks.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = col[order[i]];
      if (distinct.empty() || distinct.back() != v) distinct.push_back(v);
      ranks[order[i]] = static_cast<std::uint32_t>(distinct.size() - 1);
    }
    if (distinct.size() == 2) {
      auto& upper = upper_rows_[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < n; ++i)
        if (ranks[i] == 1) upper.push_back(static_cast<std::uint32_t>(i));
    } else if (distinct.size() > 2) {
      dense_cols_.push_back(c);
      dense_offsets_.push_back(dense_bins_);
      dense_bins_ += distinct.size();
    }
  }
  const std::size_t w = dense_cols_.size();
  dense_codes_.resize(n * w);
  for (std::size_t j = 0; j < w; ++j) {
    const auto& ranks = ranks_[static_cast<std::size_t>(dense_cols_[j])];
    const auto off = static_cast<std::uint32_t>(dense_offsets_[j]);
    for (std::size_t i = 0; i < n; ++i) dense_codes_[i * w + j] = off + ranks[i];
  }
}

}  // namespace fdml
