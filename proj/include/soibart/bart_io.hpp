#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "soibart/bart.hpp"
#include "soibart/errors.hpp"
#include "soibart/tree.hpp"

namespace soibart {

inline constexpr const char* kPosteriorSchema = "soibart-posterior/1";

namespace detail {

inline nlohmann::json tree_node_to_json(const DecisionTree& tree, int id) {
  const TreeNode& nd = tree.node(id);
  if (nd.is_leaf()) return nlohmann::json{{"mu", nd.mu}};
  return nlohmann::json{{"var", nd.split_var},
                        {"cut", nd.cut_value},
                        {"left", tree_node_to_json(tree, nd.left)},
                        {"right", tree_node_to_json(tree, nd.right)}};
}

inline int tree_node_from_json(const nlohmann::json& j, DecisionTree& tree, int slot) {
  if (j.contains("mu")) {
    tree.node(slot).mu = j.at("mu").get<double>();
    return slot;
  }
  if (!j.contains("var") || !j.contains("cut") || !j.contains("left") || !j.contains("right"))
    fail(ErrorCode::BadSnapshot, "tree node needs mu or var/cut/left/right");
  tree.grow(slot, j.at("var").get<int>(), -1, j.at("cut").get<double>(), 0.0, 0.0);
  tree_node_from_json(j.at("left"), tree, tree.node(slot).left);
  tree_node_from_json(j.at("right"), tree, tree.node(slot).right);
  return slot;
}

}  // namespace detail

inline nlohmann::json tree_to_json(const DecisionTree& tree) {
  return detail::tree_node_to_json(tree, tree.root());
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
  DecisionTree tree;
  detail::tree_node_from_json(j, tree, tree.root());
  return tree;
}

// Versioned snapshot so fitted posteriors can be replayed without refitting.
inline nlohmann::json posterior_to_json(const BartPosterior& posterior) {
  nlohmann::json out;
  out["schema"] = kPosteriorSchema;
  out["feature_names"] = posterior.feature_names();
  out["scaling"] = {{"offset", posterior.scaling().offset}, {"scale", posterior.scaling().scale}};
  nlohmann::json draws = nlohmann::json::array();
  for (const PosteriorDraw& draw : posterior.draws()) {
    nlohmann::json trees = nlohmann::json::array();
    for (const DecisionTree& tree : draw.trees) trees.push_back(tree_to_json(tree));
    draws.push_back(nlohmann::json{{"sigma", draw.sigma}, {"trees", std::move(trees)}});
  }
  out["draws"] = std::move(draws);
  return out;
}

inline BartPosterior posterior_from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j.at("schema").get<std::string>() != kPosteriorSchema)
    fail(ErrorCode::BadSnapshot, "unknown or missing snapshot schema");
  TargetScaling scaling;
  scaling.offset = j.at("scaling").at("offset").get<double>();
  scaling.scale = j.at("scaling").at("scale").get<double>();
  if (!(scaling.scale > 0.0)) fail(ErrorCode::BadSnapshot, "scale must be positive");
  std::vector<std::string> names = j.at("feature_names").get<std::vector<std::string>>();
  std::vector<PosteriorDraw> draws;
  for (const auto& dj : j.at("draws")) {
    PosteriorDraw draw;
    draw.sigma = dj.at("sigma").get<double>();
    if (!(draw.sigma > 0.0)) fail(ErrorCode::BadSnapshot, "sigma must be positive");
    for (const auto& tj : dj.at("trees")) draw.trees.push_back(tree_from_json(tj));
    draws.push_back(std::move(draw));
  }
  return BartPosterior(std::move(draws), scaling, std::move(names));
}

}  // namespace soibart
