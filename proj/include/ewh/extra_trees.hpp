#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ewh {

struct ExtraTreesParams {
  int n_trees = 50;
  int k_splits = 0;   // 0 => input dimension
  int n_min = 2;      // minimum samples to split a node
  std::uint64_t seed = 0;

  void validate() const;
};

// Binary regression tree with random (feature, threshold) splits and
// mean-target leaves, stored as a flat node array.
struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;      // leaf mean
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
};

class ExtraTreesModel {
 public:
  ExtraTreesModel() = default;
  ExtraTreesModel(std::vector<Tree> trees, int input_dim)
      : trees_(std::move(trees)), input_dim_(input_dim) {}

  double predict(std::span<const double> x) const;
  int input_dim() const { return input_dim_; }
  const std::vector<Tree>& trees() const { return trees_; }

  std::string to_json() const;
  static ExtraTreesModel from_json(const std::string& text);

 private:
  std::vector<Tree> trees_;
  int input_dim_ = 0;
};

// Fits the ensemble; trees are built concurrently with per-tree seeds derived
// from params.seed, so the result matches extra_trees_fit_serial exactly.
ExtraTreesModel extra_trees_fit(const std::vector<std::vector<double>>& inputs,
                                const std::vector<double>& targets,
                                const ExtraTreesParams& params);

// Serial reference used by the tests and the benchmark.
ExtraTreesModel extra_trees_fit_serial(
    const std::vector<std::vector<double>>& inputs,
    const std::vector<double>& targets, const ExtraTreesParams& params);

// Flat row-major variant; the hot path inside fitted Q-iteration.
ExtraTreesModel extra_trees_fit_flat(const std::vector<double>& x_rowmajor,
                                     int dim, const std::vector<double>& targets,
                                     const ExtraTreesParams& params,
                                     bool parallel = true);

}  // namespace ewh
