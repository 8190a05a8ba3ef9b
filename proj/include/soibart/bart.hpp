#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "soibart/dataset.hpp"
#include "soibart/errors.hpp"
#include "soibart/linalg.hpp"
#include "soibart/rng.hpp"
#include "soibart/stats.hpp"
#include "soibart/tree.hpp"

namespace soibart {

struct MoveProbs {
  double grow = 0.25;
  double prune = 0.25;
  double change = 0.40;
  double swap = 0.10;

  double sum() const { return grow + prune + change + swap; }
};

struct BartConfig {
  int m = 20;                 // trees in the ensemble
  double alpha = 0.95;        // split-prior base
  double beta = 2.0;          // split-prior depth decay
  double k = 2.0;             // leaf-prior spread divisor
  double nu = 3.0;            // sigma prior degrees of freedom
  double q = 0.90;            // sigma prior quantile anchored at the OLS estimate
  int n_iter = 1200;
  int burn_in = 200;
  int cut_grid = 100;         // cutpoints per feature (equally spaced quantiles)
  int min_leaf_size = 5;
  MoveProbs move_probs;
  bool prior_only = false;    // validation hook: likelihood terms switched off

  void validate() const {
    if (m < 1) fail(ErrorCode::InvalidConfig, "m must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidConfig, "alpha must lie in (0,1)");
    if (beta < 0.0) fail(ErrorCode::InvalidConfig, "beta must be >= 0");
    if (k <= 0.0) fail(ErrorCode::InvalidConfig, "k must be > 0");
    if (nu <= 0.0) fail(ErrorCode::InvalidConfig, "nu must be > 0");
    if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::InvalidConfig, "q must lie in (0,1)");
    if (burn_in < 0 || burn_in >= n_iter)
      fail(ErrorCode::InvalidConfig, "burn_in must be < n_iter");
    if (cut_grid < 2) fail(ErrorCode::InvalidConfig, "cut_grid must be >= 2");
    if (min_leaf_size < 1) fail(ErrorCode::InvalidConfig, "min_leaf_size must be >= 1");
    if (std::abs(move_probs.sum() - 1.0) > 1e-9)
      fail(ErrorCode::InvalidConfig, "move probabilities must sum to 1");
  }

  // Prior probability that a node at this depth is internal.
  double split_prior(int depth) const {
    return alpha * std::pow(1.0 + static_cast<double>(depth), -beta);
  }
};

// Affine map between raw targets and the standardized scale the sampler works
// on. Training targets map onto [-0.5, 0.5].
struct TargetScaling {
  double offset = 0.0;
  double scale = 1.0;

  double to_standard(double y) const { return (y - offset) / scale; }
  double to_raw(double z) const { return offset + scale * z; }
};

struct PosteriorDraw {
  std::vector<DecisionTree> trees;
  double sigma = 1.0;  // standardized-target units
};

class BartPosterior {
 public:
  BartPosterior(std::vector<PosteriorDraw> draws, TargetScaling scaling,
                std::vector<std::string> feature_names)
      : draws_(std::move(draws)), scaling_(scaling), feature_names_(std::move(feature_names)) {}

  const std::vector<PosteriorDraw>& draws() const { return draws_; }
  const TargetScaling& scaling() const { return scaling_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::size_t p() const { return feature_names_.size(); }

  // One raw-scale value per posterior draw: the sum of the draw's trees.
  std::vector<double> predict_draws(std::span<const double> x) const {
    check_dim(x);
    std::vector<double> out;
    out.reserve(draws_.size());
    for (const PosteriorDraw& draw : draws_) {
      double z = 0.0;
      for (const DecisionTree& tree : draw.trees) z += tree.predict_unchecked(x);
      out.push_back(scaling_.to_raw(z));
    }
    return out;
  }

  double predict_mean(std::span<const double> x) const {
    const auto d = predict_draws(x);
    return mean_of(d);
  }

  double predict_quantile(std::span<const double> x, double q) const {
    if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::InvalidConfig, "quantile level must lie in (0,1)");
    return quantile_of(predict_draws(x), q);
  }

  double predict_median(std::span<const double> x) const { return predict_quantile(x, 0.5); }

  // One sample from the one-step predictive distribution: a uniformly chosen
  // draw's point prediction plus that draw's observation noise.
  double sample_predictive(std::span<const double> x, Rng& rng) const {
    check_dim(x);
    const PosteriorDraw& draw = draws_[static_cast<std::size_t>(rng.uniform_index(draws_.size()))];
    double z = 0.0;
    for (const DecisionTree& tree : draw.trees) z += tree.predict_unchecked(x);
    z += draw.sigma * rng.normal();
    return scaling_.to_raw(z);
  }

  // Mean split count per draw for each feature.
  std::vector<double> mean_variable_usage() const {
    std::vector<double> mean(p(), 0.0);
    if (draws_.empty()) return mean;
    std::vector<std::size_t> counts(p(), 0);
    for (const PosteriorDraw& draw : draws_) {
      std::fill(counts.begin(), counts.end(), 0);
      for (const DecisionTree& tree : draw.trees) tree.accumulate_variable_usage(counts);
      for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += static_cast<double>(counts[j]);
    }
    for (double& v : mean) v /= static_cast<double>(draws_.size());
    return mean;
  }

 private:
  void check_dim(std::span<const double> x) const {
    if (x.size() != p())
      fail(ErrorCode::DimensionMismatch,
           "feature vector of length " + std::to_string(x.size()) + ", expected " +
               std::to_string(p()));
  }

  std::vector<PosteriorDraw> draws_;
  TargetScaling scaling_;
  std::vector<std::string> feature_names_;
};

namespace detail {

// chi-squared lower quantile, used once per fit to anchor the sigma prior.
inline double chi_squared_quantile(double dof, double prob) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(dist, prob);
}

class Sampler {
 public:
  Sampler(const SupervisedDataset& ds, const SplitMask& mask, const BartConfig& config,
          std::uint64_t seed)
      : config_(config), rng_(seed), p_(ds.p()) {
    config_.validate();
    if (mask.assignment.size() != ds.n())
      fail(ErrorCode::LengthMismatch, "mask length does not match dataset rows");

    for (std::size_t i = 0; i < ds.n(); ++i)
      if (mask.assignment[i] == Role::Train) train_rows_.push_back(i);
    n_ = train_rows_.size();
    if (n_ < 2 * static_cast<std::size_t>(config_.min_leaf_size))
      fail(ErrorCode::TooFewRows,
           std::to_string(n_) + " training rows; need at least 2*min_leaf_size");

    double y_min = ds.targets[train_rows_[0]];
    double y_max = y_min;
    for (std::size_t i : train_rows_) {
      y_min = std::min(y_min, ds.targets[i]);
      y_max = std::max(y_max, ds.targets[i]);
    }
    if (y_max == y_min) fail(ErrorCode::ConstantTarget, "training targets are constant");
    scaling_ = TargetScaling{0.5 * (y_min + y_max), y_max - y_min};

    x_.resize(n_ * p_);
    y_.resize(n_);
    std::vector<std::vector<double>> train_feature_rows;
    train_feature_rows.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& row = ds.rows[train_rows_[i]];
      std::copy(row.begin(), row.end(), x_.begin() + static_cast<std::ptrdiff_t>(i * p_));
      y_[i] = scaling_.to_standard(ds.targets[train_rows_[i]]);
      train_feature_rows.push_back(row);
    }

    build_grid();

    const double leaf_sd = 0.5 / (config_.k * std::sqrt(static_cast<double>(config_.m)));
    tau2_ = leaf_sd * leaf_sd;

    double sigma_hat = ols_residual_sd(train_feature_rows, y_);
    sigma_hat = std::max(sigma_hat, 1e-8);
    lambda_ = sigma_hat * sigma_hat *
              chi_squared_quantile(config_.nu, 1.0 - config_.q) / config_.nu;
    sigma2_ = sigma_hat * sigma_hat;

    trees_.assign(static_cast<std::size_t>(config_.m), DecisionTree{});
    fits_.assign(static_cast<std::size_t>(config_.m), std::vector<double>(n_, 0.0));
    allfit_.assign(n_, 0.0);
    resid_.resize(n_);
    leaf_of_row_.resize(n_);
  }

  // Runs the chain; post-burn-in states go to the collector as
  // collector(trees, sigma).
  template <typename Collector>
  void run(Collector&& collect) {
    for (int iter = 0; iter < config_.n_iter; ++iter) {
      for (int j = 0; j < config_.m; ++j) {
        update_tree(static_cast<std::size_t>(j));
      }
      draw_sigma();
      if (iter >= config_.burn_in) collect(trees_, std::sqrt(sigma2_));
    }
  }

  const TargetScaling& scaling() const { return scaling_; }

 private:
  enum class Move { Grow, Prune, Change, Swap };

  struct LeafInfo {
    int id = 0;
    int depth = 0;
    std::vector<std::size_t> rows;
  };

  double x_at(std::size_t row, std::size_t var) const { return x_[row * p_ + var]; }

  void build_grid() {
    grid_.assign(p_, {});
    const int G = config_.cut_grid;
    std::vector<double> col(n_);
    for (std::size_t v = 0; v < p_; ++v) {
      for (std::size_t i = 0; i < n_; ++i) col[i] = x_at(i, v);
      std::sort(col.begin(), col.end());
      grid_[v].resize(static_cast<std::size_t>(G));
      for (int c = 0; c < G; ++c) {
        const double prob = static_cast<double>(c + 1) / static_cast<double>(G + 1);
        grid_[v][static_cast<std::size_t>(c)] = quantile_sorted(col, prob);
      }
    }
  }

  // Integrated leaf likelihood given (count, residual sum), leaf value
  // marginalized out. The per-observation Gaussian factor is common to both
  // sides of every acceptance ratio and is dropped.
  double leaf_lh(double count, double sum) const {
    if (config_.prior_only) return 0.0;
    const double denom = sigma2_ + count * tau2_;
    return 0.5 * std::log(sigma2_ / denom) + tau2_ * sum * sum / (2.0 * sigma2_ * denom);
  }

  // Valid cut-index interval [lo, hi] for splitting `rows` on `var`: both
  // children keep at least min_leaf_size rows. Empty when lo > hi.
  std::pair<int, int> valid_cut_interval(const std::vector<std::size_t>& rows, std::size_t var) {
    const int k = config_.min_leaf_size;
    const int cnt = static_cast<int>(rows.size());
    if (cnt < 2 * k) return {0, -1};
    scratch_vals_.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) scratch_vals_[i] = x_at(rows[i], var);
    auto kth = scratch_vals_.begin() + (k - 1);
    std::nth_element(scratch_vals_.begin(), kth, scratch_vals_.end());
    const double low_stat = *kth;  // k-th smallest
    auto mth = scratch_vals_.begin() + (cnt - k);
    std::nth_element(scratch_vals_.begin(), mth, scratch_vals_.end());
    const double high_stat = *mth;  // (cnt-k+1)-th smallest
    const auto& g = grid_[var];
    const int lo = static_cast<int>(std::lower_bound(g.begin(), g.end(), low_stat) - g.begin());
    const int hi = static_cast<int>(std::lower_bound(g.begin(), g.end(), high_stat) - g.begin()) - 1;
    return {lo, hi};
  }

  bool leaf_growable(const std::vector<std::size_t>& rows) {
    if (rows.size() < 2 * static_cast<std::size_t>(config_.min_leaf_size)) return false;
    for (std::size_t v = 0; v < p_; ++v) {
      const auto [lo, hi] = valid_cut_interval(rows, v);
      if (lo <= hi) return true;
    }
    return false;
  }

  // Routes the training rows through a tree; returns leaves with their rows.
  std::vector<LeafInfo> collect_leaves(const DecisionTree& tree) {
    std::vector<LeafInfo> leaves;
    std::vector<int> slot(tree.pool_size(), -1);
    tree.visit([&](int id, int depth) {
      if (tree.node(id).is_leaf()) {
        slot[static_cast<std::size_t>(id)] = static_cast<int>(leaves.size());
        leaves.push_back(LeafInfo{id, depth, {}});
      }
    });
    for (std::size_t i = 0; i < n_; ++i) {
      const int leaf = tree.route(row_span(i));
      leaves[static_cast<std::size_t>(slot[static_cast<std::size_t>(leaf)])].rows.push_back(i);
    }
    return leaves;
  }

  std::span<const double> row_span(std::size_t i) const {
    return std::span<const double>(x_.data() + i * p_, p_);
  }

  std::size_t count_growable(const std::vector<LeafInfo>& leaves) {
    std::size_t g = 0;
    for (const LeafInfo& leaf : leaves)
      if (leaf_growable(leaf.rows)) ++g;
    return g;
  }

  // count/sum of partial residuals for every leaf under `node`, routing
  // `rows` through `tree`. Returns false if any leaf breaks min_leaf_size.
  bool subtree_leaf_stats(const DecisionTree& tree, int node_id,
                          const std::vector<std::size_t>& rows,
                          std::vector<std::pair<double, double>>& out) {
    stat_slot_.assign(tree.pool_size(), -1);
    out.clear();
    collect_subtree_leaves(tree, node_id, out);
    for (std::size_t r : rows) {
      int id = node_id;
      while (!tree.node(id).is_leaf()) {
        const TreeNode& nd = tree.node(id);
        id = (x_at(r, static_cast<std::size_t>(nd.split_var)) <= nd.cut_value) ? nd.left : nd.right;
      }
      auto& stat = out[static_cast<std::size_t>(stat_slot_[static_cast<std::size_t>(id)])];
      stat.first += 1.0;
      stat.second += resid_[r];
    }
    for (const auto& [count, sum] : out)
      if (count < static_cast<double>(config_.min_leaf_size)) return false;
    return true;
  }

  void collect_subtree_leaves(const DecisionTree& tree, int id,
                              std::vector<std::pair<double, double>>& out) {
    const TreeNode& nd = tree.node(id);
    if (nd.is_leaf()) {
      stat_slot_[static_cast<std::size_t>(id)] = static_cast<int>(out.size());
      out.emplace_back(0.0, 0.0);
      return;
    }
    collect_subtree_leaves(tree, nd.left, out);
    collect_subtree_leaves(tree, nd.right, out);
  }

  double sum_lh(const std::vector<std::pair<double, double>>& stats) const {
    double total = 0.0;
    for (const auto& [count, sum] : stats) total += leaf_lh(count, sum);
    return total;
  }

  void update_tree(std::size_t j) {
    DecisionTree& tree = trees_[j];
    for (std::size_t i = 0; i < n_; ++i) resid_[i] = y_[i] - (allfit_[i] - fits_[j][i]);

    const double u = rng_.uniform();
    const MoveProbs& mp = config_.move_probs;
    Move move;
    if (u < mp.grow)
      move = Move::Grow;
    else if (u < mp.grow + mp.prune)
      move = Move::Prune;
    else if (u < mp.grow + mp.prune + mp.change)
      move = Move::Change;
    else
      move = Move::Swap;

    switch (move) {
      case Move::Grow: try_grow(tree); break;
      case Move::Prune: try_prune(tree); break;
      case Move::Change: try_change(tree); break;
      case Move::Swap: try_swap(tree); break;
    }

    draw_leaf_values(j);
  }

  void try_grow(DecisionTree& tree) {
    auto leaves = collect_leaves(tree);
    std::vector<std::size_t> growable;
    for (std::size_t i = 0; i < leaves.size(); ++i)
      if (leaf_growable(leaves[i].rows)) growable.push_back(i);
    if (growable.empty()) return;

    const LeafInfo& leaf =
        leaves[growable[static_cast<std::size_t>(rng_.uniform_index(growable.size()))]];
    const std::size_t var = static_cast<std::size_t>(rng_.uniform_index(p_));
    const auto [lo, hi] = valid_cut_interval(leaf.rows, var);
    if (lo > hi) return;  // chosen variable has no admissible cut here
    const int cut = lo + static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
    const double cut_value = grid_[var][static_cast<std::size_t>(cut)];
    const double n_valid = static_cast<double>(hi - lo + 1);

    double left_count = 0.0, left_sum = 0.0, right_count = 0.0, right_sum = 0.0;
    for (std::size_t r : leaf.rows) {
      if (x_at(r, var) <= cut_value) {
        left_count += 1.0;
        left_sum += resid_[r];
      } else {
        right_count += 1.0;
        right_sum += resid_[r];
      }
    }

    DecisionTree proposal = tree;
    proposal.grow(leaf.id, static_cast<int>(var), cut, cut_value, 0.0, 0.0);
    const double n_nog_new = static_cast<double>(proposal.nogs().size());

    const double ps = config_.split_prior(leaf.depth);
    const double ps_child = config_.split_prior(leaf.depth + 1);
    const double log_prior = std::log(ps) + 2.0 * std::log(1.0 - ps_child) - std::log(1.0 - ps) -
                             std::log(static_cast<double>(p_) * config_.cut_grid);
    const double log_lik = leaf_lh(left_count, left_sum) + leaf_lh(right_count, right_sum) -
                           leaf_lh(left_count + right_count, left_sum + right_sum);
    const double log_proposal =
        std::log(config_.move_probs.prune) - std::log(n_nog_new) -
        std::log(config_.move_probs.grow) + std::log(static_cast<double>(growable.size())) +
        std::log(static_cast<double>(p_)) + std::log(n_valid);

    if (std::log(rng_.uniform_pos()) < log_prior + log_lik + log_proposal) tree = std::move(proposal);
  }

  void try_prune(DecisionTree& tree) {
    const auto nogs = tree.nogs();
    if (nogs.empty()) return;
    const int nog = nogs[static_cast<std::size_t>(rng_.uniform_index(nogs.size()))];
    const int depth = tree.depth_of(nog);
    const TreeNode& nd = tree.node(nog);
    const std::size_t var = static_cast<std::size_t>(nd.split_var);
    const double cut_value = nd.cut_value;

    // rows reaching the nog, and their split under the rule being removed
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n_; ++i) {
      int id = tree.root();
      while (!tree.node(id).is_leaf() && id != nog) {
        const TreeNode& cur = tree.node(id);
        id = (x_at(i, static_cast<std::size_t>(cur.split_var)) <= cur.cut_value) ? cur.left : cur.right;
      }
      if (id == nog) rows.push_back(i);
    }
    double left_count = 0.0, left_sum = 0.0, right_count = 0.0, right_sum = 0.0;
    for (std::size_t r : rows) {
      if (x_at(r, var) <= cut_value) {
        left_count += 1.0;
        left_sum += resid_[r];
      } else {
        right_count += 1.0;
        right_sum += resid_[r];
      }
    }

    DecisionTree proposal = tree;
    proposal.prune(nog, 0.0);
    auto pruned_leaves = collect_leaves(proposal);
    const double n_growable_new = static_cast<double>(count_growable(pruned_leaves));
    const auto [lo, hi] = valid_cut_interval(rows, var);
    // The removed cut is admissible by construction, so the interval is
    // non-empty; guard anyway.
    const double n_valid = static_cast<double>(std::max(hi - lo + 1, 1));

    const double ps = config_.split_prior(depth);
    const double ps_child = config_.split_prior(depth + 1);
    const double log_prior = -(std::log(ps) + 2.0 * std::log(1.0 - ps_child) -
                               std::log(1.0 - ps) -
                               std::log(static_cast<double>(p_) * config_.cut_grid));
    const double log_lik = leaf_lh(left_count + right_count, left_sum + right_sum) -
                           leaf_lh(left_count, left_sum) - leaf_lh(right_count, right_sum);
    const double log_proposal =
        std::log(config_.move_probs.grow) - std::log(n_growable_new) -
        std::log(static_cast<double>(p_)) - std::log(n_valid) -
        std::log(config_.move_probs.prune) + std::log(static_cast<double>(nogs.size()));

    if (std::log(rng_.uniform_pos()) < log_prior + log_lik + log_proposal) tree = std::move(proposal);
  }

  // Rows reaching an internal node.
  std::vector<std::size_t> rows_at_node(const DecisionTree& tree, int target) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n_; ++i) {
      int id = tree.root();
      while (id != target && !tree.node(id).is_leaf()) {
        const TreeNode& cur = tree.node(id);
        id = (x_at(i, static_cast<std::size_t>(cur.split_var)) <= cur.cut_value) ? cur.left : cur.right;
      }
      if (id == target) rows.push_back(i);
    }
    return rows;
  }

  void try_change(DecisionTree& tree) {
    const auto internals = tree.internal_nodes();
    if (internals.empty()) return;
    const int node = internals[static_cast<std::size_t>(rng_.uniform_index(internals.size()))];
    const std::size_t var = static_cast<std::size_t>(rng_.uniform_index(p_));
    const int cut = static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(config_.cut_grid)));

    DecisionTree proposal = tree;
    TreeNode& nd = proposal.node(node);
    nd.split_var = static_cast<int>(var);
    nd.cut_index = cut;
    nd.cut_value = grid_[var][static_cast<std::size_t>(cut)];

    accept_subtree_move(tree, proposal, node);
  }

  void try_swap(DecisionTree& tree) {
    const auto pairs = tree.internal_pairs();
    if (pairs.empty()) return;  // proposed-and-rejected on shallow trees
    const auto [parent, child] = pairs[static_cast<std::size_t>(rng_.uniform_index(pairs.size()))];

    DecisionTree proposal = tree;
    TreeNode& a = proposal.node(parent);
    TreeNode& b = proposal.node(child);
    std::swap(a.split_var, b.split_var);
    std::swap(a.cut_index, b.cut_index);
    std::swap(a.cut_value, b.cut_value);

    accept_subtree_move(tree, proposal, parent);
  }

  // Change and swap keep the leaf count and the rule prior mass fixed, and
  // draw the proposal symmetrically, so the ratio reduces to the integrated
  // likelihood over the affected subtree.
  void accept_subtree_move(DecisionTree& tree, DecisionTree& proposal, int node) {
    const auto rows = rows_at_node(tree, node);
    if (!subtree_leaf_stats(proposal, node, rows, proposal_stats_)) return;
    const double log_new = sum_lh(proposal_stats_);
    subtree_leaf_stats(tree, node, rows, current_stats_);
    const double log_old = sum_lh(current_stats_);
    if (std::log(rng_.uniform_pos()) < log_new - log_old) tree = std::move(proposal);
  }

  // Conjugate draw for every leaf value, then refresh this tree's fit.
  void draw_leaf_values(std::size_t j) {
    DecisionTree& tree = trees_[j];
    stat_slot_.assign(tree.pool_size(), -1);
    leaf_stats_.clear();
    std::vector<int> leaf_ids;
    tree.visit([&](int id, int) {
      if (tree.node(id).is_leaf()) {
        stat_slot_[static_cast<std::size_t>(id)] = static_cast<int>(leaf_stats_.size());
        leaf_stats_.emplace_back(0.0, 0.0);
        leaf_ids.push_back(id);
      }
    });
    for (std::size_t i = 0; i < n_; ++i) {
      const int leaf = tree.route(row_span(i));
      leaf_of_row_[i] = leaf;
      auto& stat = leaf_stats_[static_cast<std::size_t>(stat_slot_[static_cast<std::size_t>(leaf)])];
      stat.first += 1.0;
      stat.second += resid_[i];
    }
    for (std::size_t s = 0; s < leaf_ids.size(); ++s) {
      const double count = config_.prior_only ? 0.0 : leaf_stats_[s].first;
      const double sum = config_.prior_only ? 0.0 : leaf_stats_[s].second;
      const double precision = count / sigma2_ + 1.0 / tau2_;
      const double mean = (sum / sigma2_) / precision;
      tree.node(leaf_ids[s]).mu = mean + rng_.normal() / std::sqrt(precision);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double fit = tree.node(leaf_of_row_[i]).mu;
      allfit_[i] += fit - fits_[j][i];
      fits_[j][i] = fit;
    }
  }

  void draw_sigma() {
    double ssr = 0.0;
    if (!config_.prior_only) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double e = y_[i] - allfit_[i];
        ssr += e * e;
      }
    }
    const double n_eff = config_.prior_only ? 0.0 : static_cast<double>(n_);
    const double shape = 0.5 * (config_.nu + n_eff);
    const double rate = 0.5 * (config_.nu * lambda_ + ssr);
    sigma2_ = rate / rng_.gamma(shape);
  }

  BartConfig config_;
  Rng rng_;
  std::size_t p_ = 0;
  std::size_t n_ = 0;
  std::vector<std::size_t> train_rows_;
  std::vector<double> x_;  // row-major training features
  std::vector<double> y_;  // standardized training targets
  std::vector<std::vector<double>> grid_;
  TargetScaling scaling_;
  double tau2_ = 1.0;
  double lambda_ = 1.0;
  double sigma2_ = 1.0;

  std::vector<DecisionTree> trees_;
  std::vector<std::vector<double>> fits_;
  std::vector<double> allfit_;
  std::vector<double> resid_;
  std::vector<int> leaf_of_row_;

  // scratch
  std::vector<double> scratch_vals_;
  std::vector<int> stat_slot_;
  std::vector<std::pair<double, double>> leaf_stats_;
  std::vector<std::pair<double, double>> proposal_stats_;
  std::vector<std::pair<double, double>> current_stats_;
};

}  // namespace detail

// Backfitting sampler over the sum-of-trees model. Deterministic given
// (dataset, mask, config, seed).
inline BartPosterior fit(const SupervisedDataset& ds, const SplitMask& mask,
                         const BartConfig& config, std::uint64_t seed) {
  detail::Sampler sampler(ds, mask, config, seed);
  std::vector<PosteriorDraw> draws;
  draws.reserve(static_cast<std::size_t>(config.n_iter - config.burn_in));
  sampler.run([&](const std::vector<DecisionTree>& trees, double sigma) {
    PosteriorDraw draw;
    draw.trees.reserve(trees.size());
    for (const DecisionTree& t : trees) draw.trees.push_back(t.compacted());
    draw.sigma = sigma;
    draws.push_back(std::move(draw));
  });
  return BartPosterior(std::move(draws), sampler.scaling(), ds.feature_names);
}

struct ImportanceReport {
  std::vector<std::string> feature_names;
  std::vector<double> importance;  // normalized so the across-feature mean is 1
};

// Usage-count importance from a tree-starved configuration: splits per draw,
// averaged over draws and runs, normalized to mean 1.
inline ImportanceReport variable_importance(const SupervisedDataset& ds, const SplitMask& mask,
                                            const BartConfig& config, std::size_t runs,
                                            std::uint64_t seed) {
  if (runs < 1) fail(ErrorCode::InvalidConfig, "need at least one run");
  Rng seeder(seed);
  std::vector<double> total(ds.p(), 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    const BartPosterior posterior = fit(ds, mask, config, seeder.child(r).next_u64());
    const auto usage = posterior.mean_variable_usage();
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += usage[j];
  }
  for (double& v : total) v /= static_cast<double>(runs);
  double mean = mean_of(total);
  if (mean > 0.0)
    for (double& v : total) v /= mean;
  return ImportanceReport{ds.feature_names, std::move(total)};
}

}  // namespace soibart
