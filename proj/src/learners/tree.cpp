#include <algorithm>
#include <limits>

#include "fdml/error.hpp"
#include "fdml/learners.hpp"

namespace fdml {

namespace {

struct NodeStats {
  int node = 0;
  double sum = 0;
  std::size_t count = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
};

struct SplitChoice {
  double gain = 0;
  int feature = -1;
  std::uint32_t left_last = 0;   // last rank that goes left
  std::uint32_t right_first = 0;  // first populated rank on the right
};

struct Bin {
  double sum = 0;
  std::size_t count = 0;
};

void check_tree_params(const LearnerParams& params) {
  if (params.max_depth < 1 || params.max_depth > kMaxTreeDepth)
    throw Error(ErrorCode::validation, "max_depth must be in 1.." + std::to_string(kMaxTreeDepth) + ", got " +
                                           std::to_string(params.max_depth));
  if (params.min_samples_leaf < 1) throw Error(ErrorCode::validation, "min_samples_leaf must be >= 1");
}

}  // namespace

double RegressionTree::predict(const Eigen::MatrixXd& x, Eigen::Index row) const {
  int i = 0;
  while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    i = x(row, n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes_[static_cast<std::size_t>(i)].value;
}

int RegressionTree::depth() const {
  int d = 0;
  for (const auto& n : nodes_)
    if (n.feature < 0) d = std::max(d, n.depth);
  return d;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

RegressionTree fit_regression_tree(const FeatureMatrix& features, std::span<const double> targets,
                                   std::span<const std::size_t> rows, const LearnerParams& params) {
  check_tree_params(params);
  if (rows.empty()) throw Error(ErrorCode::dimension, "cannot fit a tree on zero rows");
  if (static_cast<Eigen::Index>(targets.size()) != features.rows())
    throw Error(ErrorCode::dimension, "target length differs from feature rows");

  const auto min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
  // Per data row: index into `active`, -1 when not sampled or already in a finished leaf.
  std::vector<int> slot(targets.size(), -1);
  for (auto r : rows) slot[r] = 0;
  // Per data row: index into `splittable` for the current level, else -1.
  std::vector<int> split_of(targets.size(), -1);

  std::vector<std::uint32_t> work;
  work.reserve(rows.size());

  std::vector<TreeNode> nodes(1);
  std::vector<NodeStats> active(1);
  // Dense histograms per active node; a split's larger child is derived as
  // parent minus the smaller child, so each level only visits the smaller halves.
  const std::size_t width = features.dense_bins();
  std::vector<Bin> node_hist;
  std::vector<Bin> parent_hist;
  std::vector<std::size_t> pair_parent;  // next level's pair q -> its parent's slot at this level
  std::vector<Bin> pair_hist;

  for (int depth = 0;; ++depth) {
    for (auto& a : active) a = NodeStats{a.node};
    for (auto r : rows) {
      if (slot[r] < 0) continue;
      auto& a = active[static_cast<std::size_t>(slot[r])];
      const double g = targets[r];
      a.sum += g;
      ++a.count;
      a.lo = std::min(a.lo, g);
      a.hi = std::max(a.hi, g);
    }

    std::vector<int> split_index(active.size(), -1);
    std::vector<std::size_t> splittable;
    for (std::size_t s = 0; s < active.size(); ++s) {
      auto& a = active[s];
      auto& node = nodes[static_cast<std::size_t>(a.node)];
      node.value = a.count ? a.sum / static_cast<double>(a.count) : 0.0;
      if (depth < params.max_depth && a.count >= 2 * min_leaf && a.hi > a.lo) {
        split_index[s] = static_cast<int>(splittable.size());
        splittable.push_back(s);
      }
    }
    if (splittable.empty()) break;

    // Which nodes get a direct histogram pass.
    std::vector<char> direct(active.size(), 0);
    if (depth == 0) {
      direct[0] = 1;
    } else {
      for (std::size_t q = 0; 2 * q + 1 < active.size(); ++q) {
        if (split_index[2 * q] < 0 && split_index[2 * q + 1] < 0) continue;
        direct[active[2 * q].count <= active[2 * q + 1].count ? 2 * q : 2 * q + 1] = 1;
      }
    }

    work.clear();
    for (auto r : rows) {
      if (slot[r] < 0) continue;
      const auto s = static_cast<std::size_t>(slot[r]);
      split_of[r] = split_index[s];
      if (direct[s]) work.push_back(static_cast<std::uint32_t>(r));
    }

    node_hist.assign(active.size() * width, Bin{});
    for (auto r : work) {
      Bin* h = &node_hist[static_cast<std::size_t>(slot[r]) * width];
      const double g = targets[r];
      for (auto code : features.dense_codes(r)) {
        h[code].sum += g;
        ++h[code].count;
      }
    }
    if (depth > 0) {
      for (std::size_t q = 0; 2 * q + 1 < active.size(); ++q) {
        const std::size_t d = direct[2 * q] ? 2 * q : 2 * q + 1;
        if (!direct[d]) continue;
        const std::size_t o = d ^ 1;
        const Bin* ph = &parent_hist[pair_parent[q] * width];
        const Bin* dh = &node_hist[d * width];
        Bin* oh = &node_hist[o * width];
        for (std::size_t i = 0; i < width; ++i) oh[i] = Bin{ph[i].sum - dh[i].sum, ph[i].count - dh[i].count};
      }
    }

    std::vector<SplitChoice> best(splittable.size());
    auto scan = [&](const Bin* h, std::size_t nd, std::size_t si, Eigen::Index f) {
      const auto& a = active[splittable[si]];
      const double total_sum = a.sum;
      const auto total_n = static_cast<double>(a.count);
      const double parent = total_sum * total_sum / total_n;
      double left_sum = 0;
      std::size_t left_n = 0;
      std::int64_t prev = -1;
      for (std::size_t r = 0; r < nd; ++r) {
        if (h[r].count == 0) continue;
        if (prev >= 0 && left_n >= min_leaf && a.count - left_n >= min_leaf) {
          const double right_sum = total_sum - left_sum;
          const auto nl = static_cast<double>(left_n);
          const auto nr = total_n - nl;
          const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
          if (gain > best[si].gain) {
            best[si] = {gain, static_cast<int>(f), static_cast<std::uint32_t>(prev), static_cast<std::uint32_t>(r)};
          }
        }
        left_sum += h[r].sum;
        left_n += h[r].count;
        prev = static_cast<std::int64_t>(r);
      }
    };

    std::size_t dense_j = 0;
    for (Eigen::Index f = 0; f < features.cols(); ++f) {
      const std::size_t nd = features.distinct(f).size();
      if (nd < 2) continue;
      if (nd == 2) {
        // Only the upper-value rows are visited; the lower bin is the node total minus them.
        pair_hist.assign(splittable.size() * 2, Bin{});
        for (auto r : features.upper_rows(f)) {
          const int si = split_of[r];
          if (si < 0) continue;
          Bin& b = pair_hist[static_cast<std::size_t>(si) * 2 + 1];
          b.sum += targets[r];
          ++b.count;
        }
        for (std::size_t si = 0; si < splittable.size(); ++si) {
          const auto& a = active[splittable[si]];
          pair_hist[si * 2] = Bin{a.sum - pair_hist[si * 2 + 1].sum, a.count - pair_hist[si * 2 + 1].count};
          scan(&pair_hist[si * 2], 2, si, f);
        }
      } else {
        const std::size_t off = features.dense_offsets()[dense_j++];
        for (std::size_t si = 0; si < splittable.size(); ++si)
          scan(&node_hist[splittable[si] * width + off], nd, si, f);
      }
    }
    for (auto r : rows) split_of[r] = -1;

    std::vector<NodeStats> next;
    std::vector<int> left_slot(active.size(), -1);
    pair_parent.clear();
    for (std::size_t si = 0; si < splittable.size(); ++si) {
      const auto& choice = best[si];
      if (choice.feature < 0) continue;
      const std::size_t s = splittable[si];
      const auto values = features.distinct(choice.feature);
      const double lo = values[choice.left_last];
      const double hi = values[choice.right_first];
      double threshold = lo + 0.5 * (hi - lo);
      if (!(threshold < hi)) threshold = lo;

      const int parent_id = active[s].node;
      const int left_id = static_cast<int>(nodes.size());
      nodes.push_back(TreeNode{-1, 0, -1, -1, depth + 1, 0});
      nodes.push_back(TreeNode{-1, 0, -1, -1, depth + 1, 0});
      auto& parent = nodes[static_cast<std::size_t>(parent_id)];
      parent.feature = choice.feature;
      parent.threshold = threshold;
      parent.left = left_id;
      parent.right = left_id + 1;

      left_slot[s] = static_cast<int>(next.size());
      pair_parent.push_back(s);
      next.push_back(NodeStats{left_id});
      next.push_back(NodeStats{left_id + 1});
    }
    if (next.empty()) break;

    for (auto r : rows) {
      if (slot[r] < 0) continue;
      const int ls = left_slot[static_cast<std::size_t>(slot[r])];
      if (ls < 0) {
        slot[r] = -1;
        continue;
      }
      const auto& parent = nodes[static_cast<std::size_t>(active[static_cast<std::size_t>(slot[r])].node)];
      const auto f = static_cast<Eigen::Index>(parent.feature);
      // route on the rank so training rows agree exactly with the recorded threshold
      const double v = features.distinct(f)[features.ranks(f)[r]];
      slot[r] = v <= parent.threshold ? ls : ls + 1;
    }
    active = std::move(next);
    std::swap(parent_hist, node_hist);
  }
  return RegressionTree(std::move(nodes));
}

RegressionTree fit_regression_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LearnerParams& params) {
  check_tree_params(params);
  if (x.rows() != y.size() || x.rows() == 0)
    throw Error(ErrorCode::dimension, "X has " + std::to_string(x.rows()) + " rows, y has " + std::to_string(y.size()));
  FeatureMatrix fm(x);
  std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return fit_regression_tree(fm, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), rows, params);
}

}  // namespace fdml
