#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "soibart/errors.hpp"

namespace soibart {

// One slot in the node pool. Leaves carry the fitted value, internal nodes an
// axis-aligned rule. cut_index references the sampler's cutpoint grid and is
// only meaningful while the tree is being sampled; prediction uses cut_value.
struct TreeNode {
  int split_var = -1;   // -1 marks a leaf
  int cut_index = -1;
  double cut_value = 0.0;
  double mu = 0.0;      // leaf value in standardized-target units
  int left = -1;
  int right = -1;

  bool is_leaf() const { return split_var < 0; }
};

struct TreeStats {
  int depth = 0;
  int leaf_count = 0;
  int internal_count = 0;
};

// Binary regression tree with value semantics. Nodes live in a pool vector;
// pruning leaves dead slots behind, compact() drops them before a tree is
// retained as a posterior snapshot.
class DecisionTree {
 public:
  DecisionTree() { nodes_.push_back(TreeNode{}); }

  static DecisionTree leaf(double mu) {
    DecisionTree t;
    t.nodes_[0].mu = mu;
    return t;
  }

  int root() const { return 0; }
  const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  TreeNode& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t pool_size() const { return nodes_.size(); }

  // Ties route left: feature value <= cut goes to the left child.
  int route(std::span<const double> x) const {
    int id = 0;
    while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
      const TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
      id = (x[static_cast<std::size_t>(nd.split_var)] <= nd.cut_value) ? nd.left : nd.right;
    }
    return id;
  }

  double predict(std::span<const double> x, std::size_t expected_p) const {
    if (x.size() != expected_p)
      fail(ErrorCode::DimensionMismatch,
           "feature vector of length " + std::to_string(x.size()) + ", expected " +
               std::to_string(expected_p));
    return nodes_[static_cast<std::size_t>(route(x))].mu;
  }

  double predict_unchecked(std::span<const double> x) const {
    return nodes_[static_cast<std::size_t>(route(x))].mu;
  }

  // Turns a leaf into an internal node with two fresh leaves.
  void grow(int leaf_id, int var, int cut_index, double cut_value, double mu_left, double mu_right) {
    const int l = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{-1, -1, 0.0, mu_left, -1, -1});
    const int r = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{-1, -1, 0.0, mu_right, -1, -1});
    TreeNode& nd = nodes_[static_cast<std::size_t>(leaf_id)];
    nd.split_var = var;
    nd.cut_index = cut_index;
    nd.cut_value = cut_value;
    nd.left = l;
    nd.right = r;
  }

  // Collapses an internal node whose children are both leaves. The child
  // slots become unreachable until the next compact().
  void prune(int nog_id, double mu) {
    TreeNode& nd = nodes_[static_cast<std::size_t>(nog_id)];
    nd.split_var = -1;
    nd.cut_index = -1;
    nd.cut_value = 0.0;
    nd.left = -1;
    nd.right = -1;
    nd.mu = mu;
  }

  template <typename Visitor>
  void visit(Visitor&& fn) const {  // fn(id, depth)
    visit_from(0, 0, fn);
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    visit([&](int id, int) {
      if (node(id).is_leaf()) out.push_back(id);
    });
    return out;
  }

  // Internal nodes whose children are both leaves ("no grandchildren").
  std::vector<int> nogs() const {
    std::vector<int> out;
    visit([&](int id, int) {
      const TreeNode& nd = node(id);
      if (!nd.is_leaf() && node(nd.left).is_leaf() && node(nd.right).is_leaf()) out.push_back(id);
    });
    return out;
  }

  std::vector<int> internal_nodes() const {
    std::vector<int> out;
    visit([&](int id, int) {
      if (!node(id).is_leaf()) out.push_back(id);
    });
    return out;
  }

  // (parent, child) pairs where both are internal; the swap proposal's domain.
  std::vector<std::pair<int, int>> internal_pairs() const {
    std::vector<std::pair<int, int>> out;
    visit([&](int id, int) {
      const TreeNode& nd = node(id);
      if (nd.is_leaf()) return;
      if (!node(nd.left).is_leaf()) out.emplace_back(id, nd.left);
      if (!node(nd.right).is_leaf()) out.emplace_back(id, nd.right);
    });
    return out;
  }

  int depth_of(int target) const {
    int found = -1;
    visit([&](int id, int depth) {
      if (id == target) found = depth;
    });
    return found;
  }

  TreeStats stats() const {
    TreeStats s;
    visit([&](int id, int depth) {
      if (node(id).is_leaf()) {
        ++s.leaf_count;
        s.depth = std::max(s.depth, depth);
      } else {
        ++s.internal_count;
      }
    });
    return s;
  }

  // counts[j] = number of internal nodes splitting on feature j.
  void accumulate_variable_usage(std::vector<std::size_t>& counts) const {
    visit([&](int id, int) {
      const TreeNode& nd = node(id);
      if (!nd.is_leaf()) ++counts[static_cast<std::size_t>(nd.split_var)];
    });
  }

  std::vector<std::size_t> variable_usage(std::size_t p) const {
    std::vector<std::size_t> counts(p, 0);
    accumulate_variable_usage(counts);
    return counts;
  }

  // Rebuilds the pool without dead slots, in preorder.
  DecisionTree compacted() const {
    DecisionTree out;
    out.nodes_.clear();
    copy_subtree(0, out.nodes_);
    return out;
  }

 private:
  template <typename Visitor>
  void visit_from(int id, int depth, Visitor& fn) const {
    fn(id, depth);
    const TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
    if (!nd.is_leaf()) {
      visit_from(nd.left, depth + 1, fn);
      visit_from(nd.right, depth + 1, fn);
    }
  }

  int copy_subtree(int id, std::vector<TreeNode>& out) const {
    const TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
    const int slot = static_cast<int>(out.size());
    out.push_back(nd);
    if (!nd.is_leaf()) {
      out[static_cast<std::size_t>(slot)].left = copy_subtree(nd.left, out);
      out[static_cast<std::size_t>(slot)].right = copy_subtree(nd.right, out);
    }
    return slot;
  }

  std::vector<TreeNode> nodes_;
};

}  // namespace soibart
