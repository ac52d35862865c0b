#include "ewh/extra_trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ewh/seeds.hpp"
#include "json.hpp"

namespace ewh {

void ExtraTreesParams::validate() const {
  if (n_trees < 1) throw std::invalid_argument("ExtraTreesParams: n_trees >= 1");
  if (k_splits < 0) throw std::invalid_argument("ExtraTreesParams: k_splits >= 0");
  if (n_min < 2) throw std::invalid_argument("ExtraTreesParams: n_min >= 2");
}

double Tree::predict(std::span<const double> x) const {
  int node = 0;
  while (nodes[node].feature >= 0) {
    const TreeNode& nd = nodes[node];
    node = (x[nd.feature] <= nd.threshold) ? nd.left : nd.right;
  }
  return nodes[node].value;
}

double ExtraTreesModel::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_)
    throw std::invalid_argument("predict: input dimension mismatch");
  double sum = 0.0;
  for (const Tree& t : trees_) sum += t.predict(x);
  return sum / static_cast<double>(trees_.size());
}

namespace {

struct Builder {
  const double* x;   // row-major [n, dim]
  const double* y;
  int dim;
  int k_splits;
  int n_min;
  Rng rng;
  std::vector<int> idx;
  std::vector<int> feat_order;
  Tree tree;

  Builder(const double* x_, const double* y_, int n, int dim_, int k, int nmin,
          std::uint64_t seed)
      : x(x_), y(y_), dim(dim_), k_splits(k), n_min(nmin), rng(seed) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    feat_order.resize(dim);
  }

  int make_leaf(int begin, int end) {
    double sum = 0.0;
    for (int i = begin; i < end; ++i) sum += y[idx[i]];
    TreeNode leaf;
    leaf.value = sum / (end - begin);
    tree.nodes.push_back(leaf);
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  int build(int begin, int end) {
    const int n = end - begin;
    if (n < n_min) return make_leaf(begin, end);

    bool const_y = true;
    for (int i = begin + 1; i < end && const_y; ++i)
      const_y = (y[idx[i]] == y[idx[begin]]);
    if (const_y) return make_leaf(begin, end);

    std::iota(feat_order.begin(), feat_order.end(), 0);
    // Fisher-Yates; candidate features without replacement when k <= dim.
    for (int i = dim - 1; i > 0; --i) {
      int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(feat_order[i], feat_order[j]);
    }

    int best_feat = -1;
    double best_thr = 0.0, best_score = -1.0;
    int tried = 0;
    for (int fi = 0; fi < dim && tried < k_splits; ++fi) {
      const int f = feat_order[fi];
      double lo = x[static_cast<std::size_t>(idx[begin]) * dim + f];
      double hi = lo;
      for (int i = begin + 1; i < end; ++i) {
        double v = x[static_cast<std::size_t>(idx[i]) * dim + f];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (lo == hi) continue;  // constant feature
      ++tried;
      double thr = rng.uniform(lo, hi);
      double sl = 0.0, sr = 0.0;
      int nl = 0;
      for (int i = begin; i < end; ++i) {
        double yi = y[idx[i]];
        if (x[static_cast<std::size_t>(idx[i]) * dim + f] <= thr) {
          sl += yi;
          ++nl;
        } else {
          sr += yi;
        }
      }
      const int nr = n - nl;
      if (nl == 0 || nr == 0) continue;
      // maximizing sl^2/nl + sr^2/nr is variance reduction up to a constant
      double score = sl * sl / nl + sr * sr / nr;
      if (score > best_score) {  // ties keep the earliest candidate
        best_score = score;
        best_feat = f;
        best_thr = thr;
      }
    }
    if (best_feat < 0) return make_leaf(begin, end);  // all inputs identical

    auto mid_it = std::partition(idx.begin() + begin, idx.begin() + end,
                                 [&](int i) {
                                   return x[static_cast<std::size_t>(i) * dim +
                                            best_feat] <= best_thr;
                                 });
    int mid = static_cast<int>(mid_it - idx.begin());

    TreeNode node;
    node.feature = best_feat;
    node.threshold = best_thr;
    tree.nodes.push_back(node);
    int self = static_cast<int>(tree.nodes.size()) - 1;
    tree.nodes[self].left = build(begin, mid);
    tree.nodes[self].right = build(mid, end);
    return self;
  }
};

Tree build_tree(const double* x, const double* y, int n, int dim, int k,
                int n_min, std::uint64_t seed) {
  Builder b(x, y, n, dim, k, n_min, seed);
  b.tree.nodes.reserve(2 * static_cast<std::size_t>(n) / n_min + 1);
  b.build(0, n);  // root lands at index 0
  return std::move(b.tree);
}

}  // namespace

ExtraTreesModel extra_trees_fit_flat(const std::vector<double>& x_rowmajor,
                                     int dim, const std::vector<double>& targets,
                                     const ExtraTreesParams& params,
                                     bool parallel) {
  params.validate();
  if (targets.empty()) throw std::invalid_argument("fit: empty input");
  if (dim < 1 || x_rowmajor.size() != targets.size() * static_cast<std::size_t>(dim))
    throw std::invalid_argument("fit: input dimension mismatch");
  for (double v : x_rowmajor)
    if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite input");
  for (double v : targets)
    if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite target");

  const int n = static_cast<int>(targets.size());
  const int k = params.k_splits > 0 ? params.k_splits : dim;

  std::vector<std::uint64_t> tree_seeds(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t)
    tree_seeds[t] = derive_seed(params.seed, static_cast<std::uint64_t>(t));

  std::vector<Tree> trees(params.n_trees);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < params.n_trees; ++t)
      trees[t] = build_tree(x_rowmajor.data(), targets.data(), n, dim, k,
                            params.n_min, tree_seeds[t]);
  } else {
    for (int t = 0; t < params.n_trees; ++t)
      trees[t] = build_tree(x_rowmajor.data(), targets.data(), n, dim, k,
                            params.n_min, tree_seeds[t]);
  }
  return ExtraTreesModel(std::move(trees), dim);
}

namespace {
std::vector<double> flatten(const std::vector<std::vector<double>>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("fit: empty input");
  const std::size_t dim = inputs.front().size();
  std::vector<double> flat;
  flat.reserve(inputs.size() * dim);
  for (const auto& row : inputs) {
    if (row.size() != dim)
      throw std::invalid_argument("fit: input dimension mismatch");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}
}  // namespace

ExtraTreesModel extra_trees_fit(const std::vector<std::vector<double>>& inputs,
                                const std::vector<double>& targets,
                                const ExtraTreesParams& params) {
  auto flat = flatten(inputs);
  return extra_trees_fit_flat(flat, static_cast<int>(inputs.front().size()),
                              targets, params, /*parallel=*/true);
}

ExtraTreesModel extra_trees_fit_serial(
    const std::vector<std::vector<double>>& inputs,
    const std::vector<double>& targets, const ExtraTreesParams& params) {
  auto flat = flatten(inputs);
  return extra_trees_fit_flat(flat, static_cast<int>(inputs.front().size()),
                              targets, params, /*parallel=*/false);
}

std::string ExtraTreesModel::to_json() const {
  nlohmann::json j;
  j["input_dim"] = input_dim_;
  auto& jt = j["trees"] = nlohmann::json::array();
  for (const Tree& t : trees_) {
    nlohmann::json jn = nlohmann::json::array();
    for (const TreeNode& n : t.nodes)
      jn.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    jt.push_back(std::move(jn));
  }
  return j.dump();
}

ExtraTreesModel ExtraTreesModel::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<Tree> trees;
  for (const auto& jn : j.at("trees")) {
    Tree t;
    for (const auto& n : jn) {
      TreeNode node;
      node.feature = n.at(0).get<int>();
      node.threshold = n.at(1).get<double>();
      node.left = n.at(2).get<int>();
      node.right = n.at(3).get<int>();
      node.value = n.at(4).get<double>();
      t.nodes.push_back(node);
    }
    trees.push_back(std::move(t));
  }
  return ExtraTreesModel(std::move(trees), j.at("input_dim").get<int>());
}

}  // namespace ewh
