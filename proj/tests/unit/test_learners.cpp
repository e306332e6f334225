#include <doctest.h>

#include <numeric>
#include <random>

#include "fdml/error.hpp"
#include "fdml/learners.hpp"
#include "oracles.hpp"

using namespace fdml;

namespace {

struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

// Mix of binary, small-integer and continuous columns with a nonlinear signal.
Data make_data(std::uint64_t seed, Eigen::Index n = 300) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0, 1);
  std::bernoulli_distribution coin(0.4);
  std::uniform_int_distribution<int> small(0, 5);
  Data d{Eigen::MatrixXd(n, 4), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    d.x(i, 0) = coin(rng) ? 1.0 : 0.0;
    d.x(i, 1) = small(rng);
    d.x(i, 2) = z(rng);
    d.x(i, 3) = z(rng);
    d.y(i) = 0.8 * d.x(i, 0) + (d.x(i, 1) > 2 ? 1.0 : -0.5) + std::sin(2 * d.x(i, 2)) + 0.3 * z(rng);
  }
  return d;
}

oracle::Mat to_rows(const Eigen::MatrixXd& x) {
  oracle::Mat m(static_cast<std::size_t>(x.rows()), oracle::Vec(static_cast<std::size_t>(x.cols())));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x(i, j);
  return m;
}

oracle::Vec to_vec(const Eigen::VectorXd& y) { return oracle::Vec(y.data(), y.data() + y.size()); }

std::span<const double> span_of(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

LearnerParams params(int depth, int stages = 1, double lr = 0.1, int min_leaf = 1, double subsample = 1.0) {
  LearnerParams p;
  p.max_depth = depth;
  p.n_stages = stages;
  p.learning_rate = lr;
  p.min_samples_leaf = min_leaf;
  p.subsample_fraction = subsample;
  return p;
}

double mse(const Eigen::VectorXd& y, const Eigen::VectorXd& pred) { return (y - pred).squaredNorm() / y.size(); }

template <class Model>
Eigen::VectorXd predict_all(const Model& m, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = m.predict(x, i);
  return out;
}

// Rows reaching each leaf of a tree.
std::map<int, int> leaf_sizes(const RegressionTree& t, const Eigen::MatrixXd& x) {
  std::map<int, int> sizes;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    int i = 0;
    while (t.nodes()[static_cast<std::size_t>(i)].feature >= 0) {
      const auto& n = t.nodes()[static_cast<std::size_t>(i)];
      i = x(r, n.feature) <= n.threshold ? n.left : n.right;
    }
    ++sizes[i];
  }
  return sizes;
}

}  // namespace

TEST_CASE("constant target gives a single leaf") {
  Eigen::MatrixXd x(5, 2);
  x << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 2.5);
  const auto t = fit_regression_tree(x, y, params(3));
  CHECK(t.leaf_count() == 1);
  CHECK(t.predict(x, 3) == 2.5);
}

TEST_CASE("step function splits between 1 and 2") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  Eigen::VectorXd y(4);
  y << 0, 0, 1, 1;
  const auto t = fit_regression_tree(x, y, params(1));
  REQUIRE(t.nodes().size() == 3);
  CHECK(t.nodes()[0].threshold > 1);
  CHECK(t.nodes()[0].threshold < 2);
  CHECK(t.predict(x, 0) == 0);
  CHECK(t.predict(x, 3) == 1);
  CHECK(mse(y, predict_all(t, x)) == 0);
}

TEST_CASE("depth outside 1..5 is rejected") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(4, 0, 1);
  CHECK_THROWS_AS(fit_regression_tree(x, y, params(0)), Error);
  CHECK_THROWS_AS(fit_regression_tree(x, y, params(6)), Error);
  CHECK_THROWS_AS(RegressorSpec({LearnerKind::boosted_trees, params(6)}).validate(), Error);
  CHECK_NOTHROW(RegressorSpec({LearnerKind::boosted_trees, params(5)}).validate());
  CHECK_THROWS_AS(fit_regression_tree(x, Eigen::VectorXd::Zero(3), params(2)), Error);
}

TEST_CASE("root split matches exhaustive search") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto d = make_data(seed, 80);
    const std::size_t min_leaf = 1 + seed % 7;
    const auto t = fit_regression_tree(d.x, d.y, params(1, 1, 0.1, static_cast<int>(min_leaf)));
    const auto best = oracle::best_split(to_rows(d.x), to_vec(d.y), min_leaf);
    REQUIRE(best.found == (t.leaf_count() == 2));
    if (!best.found) continue;
    CHECK(t.nodes()[0].feature == static_cast<int>(best.feature));
    CHECK(t.nodes()[0].threshold == doctest::Approx(best.threshold).epsilon(1e-12));
    CHECK(mse(d.y, predict_all(t, d.x)) * static_cast<double>(d.y.size()) ==
          doctest::Approx(best.sse).epsilon(1e-9));
  }
}

TEST_CASE("shifting the target shifts the leaves only") {
  const auto d = make_data(4);
  const auto a = fit_regression_tree(d.x, d.y, params(4, 1, 0.1, 5));
  const Eigen::VectorXd shifted = d.y.array() + 3.0;
  const auto b = fit_regression_tree(d.x, shifted, params(4, 1, 0.1, 5));
  REQUIRE(a.nodes().size() == b.nodes().size());
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    CHECK(a.nodes()[i].feature == b.nodes()[i].feature);
    CHECK(a.nodes()[i].threshold == b.nodes()[i].threshold);
    CHECK(b.nodes()[i].value == doctest::Approx(a.nodes()[i].value + 3.0).epsilon(1e-12));
  }
}

TEST_CASE("trees respect depth and leaf size limits") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = make_data(seed);
    for (int depth = 1; depth <= kMaxTreeDepth; ++depth) {
      const int min_leaf = static_cast<int>(seed % 4) * 5 + 1;
      const auto t = fit_regression_tree(d.x, d.y, params(depth, 1, 0.1, min_leaf));
      CHECK(t.depth() <= depth);
      for (const auto& n : t.nodes()) CHECK(n.depth <= depth);
      for (const auto& [leaf, size] : leaf_sizes(t, d.x)) CHECK(size >= min_leaf);
    }
    const auto m = fit_gradient_boosting(d.x, d.y, params(5, 20, 0.1, 3, 0.7));
    for (const auto& t : m.trees) CHECK(t.depth() <= 5);
  }
}

TEST_CASE("zero stages is the mean predictor") {
  const auto d = make_data(2);
  const auto m = fit_gradient_boosting(d.x, d.y, params(3, 0));
  const auto pred = predict_all(m, d.x);
  CHECK((pred.array() - d.y.mean()).abs().maxCoeff() < 1e-12);
  CHECK((pred.array() == pred(0)).all());
  const auto r = evaluate_predictions(span_of(d.y), span_of(pred));
  REQUIRE(r.r2.has_value());
  CHECK(*r.r2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("one full-rate stage equals a tree on the centered target") {
  const auto d = make_data(3);
  const auto m = fit_gradient_boosting(d.x, d.y, params(3, 1, 1.0, 5));
  const Eigen::VectorXd centered = d.y.array() - d.y.mean();
  const auto t = fit_regression_tree(d.x, centered, params(3, 1, 1.0, 5));
  for (Eigen::Index i = 0; i < d.x.rows(); ++i)
    CHECK(m.predict(d.x, i) == doctest::Approx(d.y.mean() + t.predict(d.x, i)).epsilon(1e-12));
}

TEST_CASE("boosting fits the step data") {
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  Eigen::VectorXd y(4);
  y << 0, 0, 1, 1;
  const auto m = fit_gradient_boosting(x, y, params(1, 50, 0.1));
  // residual shrinks by 0.9 per stage: 0.25 * 0.9^100 after 50 stages
  CHECK(m.training_mse.back() < 0.01);
  CHECK(mse(y, predict_all(m, x)) == doctest::Approx(0.25 * std::pow(0.81, 50)).epsilon(1e-9));
}

TEST_CASE("training loss never increases without subsampling") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = make_data(seed);
    const auto m = fit_gradient_boosting(d.x, d.y, params(1 + static_cast<int>(seed % 5), 40, 0.2, 5));
    REQUIRE(m.training_mse.size() == 41);
    for (std::size_t s = 1; s < m.training_mse.size(); ++s)
      CHECK(m.training_mse[s] <= m.training_mse[s - 1] + 1e-12);
  }
}

TEST_CASE("fits are deterministic in the seed") {
  const auto d = make_data(5);
  auto p = params(3, 30, 0.1, 5, 0.6);
  p.seed = 99;
  const auto a = predict_all(fit_gradient_boosting(d.x, d.y, p), d.x);
  const auto b = predict_all(fit_gradient_boosting(d.x, d.y, p), d.x);
  CHECK((a.array() == b.array()).all());
  p.seed = 100;
  const auto c = predict_all(fit_gradient_boosting(d.x, d.y, p), d.x);
  CHECK_FALSE((a.array() == c.array()).all());
}

TEST_CASE("ridge at lambda 0 equals least squares") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0, 1);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd x(40, 5);
    Eigen::VectorXd y(40);
    for (Eigen::Index i = 0; i < 40; ++i) {
      for (Eigen::Index j = 0; j < 5; ++j) x(i, j) = z(rng) + (j == 1 ? 0.5 * x(i, 0) : 0.0);
      y(i) = 1.0 + x.row(i).sum() + z(rng);
    }
    std::vector<std::size_t> rows(40);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    for (double lambda : {0.0, 2.5}) {
      const auto m = fit_ridge(x, span_of(y), rows, lambda);
      const auto ref = oracle::ridge_normal_equations(to_rows(x), to_vec(y), lambda);
      CHECK(m.intercept == doctest::Approx(ref[0]).epsilon(1e-8));
      for (Eigen::Index j = 0; j < 5; ++j)
        CHECK(m.coef(j) == doctest::Approx(ref[static_cast<std::size_t>(j) + 1]).epsilon(1e-8));
    }
  }
}

TEST_CASE("evaluate examples") {
  const std::vector<double> y{0, 2}, half{1, 1};
  const auto r = evaluate_predictions(y, half);
  CHECK(r.mse == 1);
  CHECK(*r.r2 == 0);
  const auto perfect = evaluate_predictions(y, y);
  CHECK(perfect.mse == 0);
  CHECK(*perfect.r2 == 1);
  const std::vector<double> flat{3, 3};
  CHECK_FALSE(evaluate_predictions(flat, half).r2.has_value());
}

TEST_CASE("kfold assignment is balanced") {
  for (std::size_t n : {10u, 11u, 97u}) {
    for (int k : {2, 3, 5}) {
      const auto fold = kfold_assignment(n, k, 7);
      std::vector<int> sizes(static_cast<std::size_t>(k), 0);
      for (int f : fold) ++sizes[static_cast<std::size_t>(f)];
      CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    }
  }
  CHECK_THROWS_AS(kfold_assignment(10, 1, 0), Error);
  CHECK_THROWS_AS(kfold_assignment(3, 4, 0), Error);
}

TEST_CASE("tuning") {
  const auto d = make_data(6, 200);
  const FeatureMatrix fm(d.x);

  SUBCASE("single candidate") {
    const std::vector<LearnerParams> grid{params(2, 20, 0.1, 5, 0.8)};
    const auto r = tune(LearnerKind::boosted_trees, grid, fm, span_of(d.y), 3, 1);
    CHECK(r.best.params.max_depth == 2);
    CHECK(r.mean_neg_mse.size() == 1);
    CHECK(r.report.mse == doctest::Approx(-r.mean_neg_mse[0]));
    REQUIRE(r.report.r2.has_value());
    CHECK(*r.report.r2 <= 1);
  }
  SUBCASE("depth cap is checked before fitting") {
    const std::vector<LearnerParams> grid{params(2, 20), params(6, 20)};
    CHECK_THROWS_AS(tune(LearnerKind::boosted_trees, grid, fm, span_of(d.y), 3, 1), Error);
  }
  SUBCASE("ties go to fewer stages, then shallower depth") {
    // ridge ignores the tree settings, so every candidate scores the same
    const std::vector<LearnerParams> grid{params(3, 300), params(2, 100), params(1, 100)};
    const auto r = tune(LearnerKind::ridge, grid, fm, span_of(d.y), 3, 1);
    CHECK(r.mean_neg_mse[0] == r.mean_neg_mse[1]);
    CHECK(r.best.params.n_stages == 100);
    CHECK(r.best.params.max_depth == 1);
  }
  SUBCASE("serial and parallel schedules agree bitwise") {
    const std::vector<LearnerParams> grid{params(2, 15, 0.1, 5, 0.8), params(3, 10, 0.2, 5, 0.7)};
    const auto a = tune(LearnerKind::boosted_trees, grid, fm, span_of(d.y), 3, 4, Schedule::serial);
    const auto b = tune(LearnerKind::boosted_trees, grid, fm, span_of(d.y), 3, 4, Schedule::parallel);
    CHECK(a.mean_neg_mse == b.mean_neg_mse);
    CHECK(a.report.r2 == b.report.r2);
  }
}

TEST_CASE("default grid stays under the depth cap") {
  const auto grid = default_boosting_grid();
  CHECK(grid.size() == 12);
  for (const auto& p : grid) CHECK_NOTHROW(RegressorSpec({LearnerKind::boosted_trees, p}).validate());
}
