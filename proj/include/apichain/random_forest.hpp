#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "apichain/dataset.hpp"

namespace apichain {

struct RandomForestParams {
  std::size_t n_trees = 51;
  std::size_t max_depth = 8;
  /// 0 selects floor(sqrt(d)).
  std::size_t features_per_split = 0;
  bool bootstrap = true;
  double bootstrap_rate = 1.0;
  std::size_t min_samples_split = 2;

  static RandomForestParams family_defaults() { return {51, 8, 0}; }
  static RandomForestParams package_defaults() { return {101, 64, 0}; }
};

/// Binary CART tree. Internal nodes send x[feature] <= threshold to `left`.
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::array<double, 2> votes{0.0, 0.0};  // weighted benign/malware counts at the node
  };
  std::vector<Node> nodes;

  Label predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::size_t depth() const;
};

struct RandomForestModel {
  RandomForestParams params;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  std::vector<DecisionTree> trees;

  /// Majority over trees; ties go to malware.
  Label predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::array<std::size_t, 2> votes(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Bootstrap-sampled Gini trees. Each tree draws from its own stream derived
/// from (seed, tree index), so the result does not depend on `workers`.
RandomForestModel train_random_forest(const LabeledDataset& d, const RandomForestParams& params, std::uint64_t seed,
                                      std::size_t workers = 1);

}  // namespace apichain
