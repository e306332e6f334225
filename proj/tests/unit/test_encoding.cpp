#include <doctest.h>

#include <vector>

#include "fdml/encoding.hpp"
#include "fdml/error.hpp"
#include "oracles.hpp"

using namespace fdml;

namespace {

std::vector<TreatmentCell> all_cells(int k) {
  std::vector<TreatmentCell> cells;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) cells.push_back({i, j});
  return cells;
}

}  // namespace

TEST_CASE("every cell matches the reference coding for k = 2, 3, 6") {
  for (int k : {2, 3, 6}) {
    const auto cells = all_cells(k);
    const auto m = build_effect_coded_matrix(cells, EncodingSpec{k});
    REQUIRE(m.values.rows() == k * k);
    REQUIRE(m.values.cols() == k * k - 1);
    for (std::size_t r = 0; r < cells.size(); ++r) {
      const auto expected = oracle::effect_code(cells[r].main, cells[r].rival, k);
      for (std::size_t c = 0; c < expected.size(); ++c)
        CHECK(m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) == expected[c]);
      const double sum = m.values.row(static_cast<Eigen::Index>(r)).sum();
      CHECK(sum == (cells[r] == TreatmentCell{k, k} ? -(k * k - 1) : 1));
    }
  }
}

TEST_CASE("k = 2 examples") {
  const std::vector<TreatmentCell> cells{{1, 2}, {2, 2}};
  const auto m = build_effect_coded_matrix(cells, EncodingSpec{2});
  CHECK(m.columns == std::vector<TreatmentCell>{{1, 1}, {1, 2}, {2, 1}});
  CHECK(m.values.row(0) == Eigen::RowVector3d(0, 1, 0));
  CHECK(m.values.row(1) == Eigen::RowVector3d(-1, -1, -1));
}

TEST_CASE("k = 3 with each cell once has zero column sums") {
  const auto m = build_effect_coded_matrix(all_cells(3), EncodingSpec{3});
  for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
    double sum = 0;
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) sum += m.values(r, c);
    CHECK(sum == 0);
  }
}

TEST_CASE("encode then decode returns the cell") {
  for (int k : {2, 4, 6}) {
    const auto cells = all_cells(k);
    const EncodingSpec spec{k};
    const auto m = build_effect_coded_matrix(cells, spec);
    for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
      const Eigen::VectorXd row = m.values.row(r).transpose();
      CHECK(decode_row(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), spec) ==
            cells[static_cast<std::size_t>(r)]);
    }
  }
  const std::vector<double> bad{0, 0.5, 0};
  CHECK_THROWS_AS(decode_row(bad, EncodingSpec{2}), Error);
}

TEST_CASE("custom reference cell") {
  const EncodingSpec spec{3, {1, 1}};
  const auto m = build_effect_coded_matrix(all_cells(3), spec);
  CHECK(m.columns.front() == TreatmentCell{1, 2});
  CHECK(m.values.row(0).sum() == -8);
  CHECK(m.column_of({3, 3}) == 7);
  CHECK_THROWS_AS((void)m.column_of({1, 1}), Error);
}

TEST_CASE("invalid inputs") {
  const std::vector<TreatmentCell> cells{{1, 1}};
  CHECK_THROWS_AS(build_effect_coded_matrix(cells, EncodingSpec{1}), Error);
  const std::vector<TreatmentCell> outside{{1, 4}};
  CHECK_THROWS_AS(build_effect_coded_matrix(outside, EncodingSpec{3}), Error);
}

TEST_CASE("omitted coefficient is minus the sum") {
  CHECK(recover_omitted_beta(std::vector<double>(35, 0.0)) == 0);
  CHECK(recover_omitted_beta(std::vector<double>{0.3, 0.5, -0.5}) == doctest::Approx(-0.3).epsilon(1e-15));
  // antisymmetric with zero diagonal, (k,k) left out
  const int k = 6;
  std::vector<double> betas;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= k; ++j) {
      if (i == k && j == k) continue;
      betas.push_back(i == j ? 0.0 : 0.1 * (j - i) + 0.01 * (j - i) * (j - i) * (j > i ? 1 : -1));
    }
  CHECK(recover_omitted_beta(betas) == doctest::Approx(0.0).epsilon(1e-15));
}
