#include "apichain/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "apichain/error.hpp"
#include "apichain/parallel.hpp"

namespace apichain {

Label DecisionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::int32_t at = 0;
  while (nodes[at].feature >= 0) {
    const auto& n = nodes[at];
    at = x(n.feature) <= n.threshold ? n.left : n.right;
  }
  const auto& v = nodes[at].votes;
  return v[1] >= v[0] ? Label::malware : Label::benign;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes[at].feature >= 0) {
      stack.push_back({nodes[at].left, d + 1});
      stack.push_back({nodes[at].right, d + 1});
    }
  }
  return deepest;
}

std::array<std::size_t, 2> RandomForestModel::votes(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != n_features)
    throw Error("random forest expects " + std::to_string(n_features) + " features, got " + std::to_string(x.size()));
  std::array<std::size_t, 2> v{0, 0};
  for (const auto& t : trees) ++v[static_cast<int>(t.predict(x))];
  return v;
}

Label RandomForestModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const auto v = votes(x);
  return v[1] >= v[0] ? Label::malware : Label::benign;
}

namespace {

struct Sample {
  std::size_t row;
  double weight;
};

double gini_weighted(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0) return 0;
  return w - (w0 * w0 + w1 * w1) / w;  // w * (1 - p0^2 - p1^2)
}

struct Split {
  int feature = -1;
  double threshold = 0;
  double impurity = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const LabeledDataset& d, const RandomForestParams& p, std::size_t mtry)
      : d_(d), p_(p), mtry_(mtry), perm_(d.cols()) {
    for (std::size_t j = 0; j < perm_.size(); ++j) perm_[j] = static_cast<int>(j);
  }

  DecisionTree build(std::vector<Sample> samples, std::uint64_t key) {
    tree_.nodes.clear();
    grow(samples, 0, key);
    return std::move(tree_);
  }

 private:
  std::int32_t grow(std::vector<Sample>& samples, std::size_t depth, std::uint64_t key) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::array<double, 2> votes{0, 0};
    for (const auto& s : samples) votes[static_cast<int>(d_.y[s.row])] += s.weight;
    tree_.nodes[id].votes = votes;

    const bool pure = votes[0] == 0 || votes[1] == 0;
    if (pure || depth >= p_.max_depth || samples.size() < p_.min_samples_split) return id;

    const Split split = best_split(samples, votes, key);
    if (split.feature < 0) return id;

    std::vector<Sample> left, right;
    for (const auto& s : samples) {
      (d_.X(static_cast<Eigen::Index>(s.row), split.feature) <= split.threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    const auto l = grow(left, depth + 1, mix_seed(key, 1));
    const auto r = grow(right, depth + 1, mix_seed(key, 2));
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  // Examines features in a node-local random order until mtry non-constant ones
  // have been evaluated.
  Split best_split(const std::vector<Sample>& samples, const std::array<double, 2>& votes, std::uint64_t key) {
    std::mt19937_64 rng(key);
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::size_t, std::size_t>> swaps;
    std::size_t inspected = 0;
    const std::size_t d = perm_.size();
    for (std::size_t i = 0; i < d && inspected < mtry_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      const auto j = pick(rng);
      std::swap(perm_[i], perm_[j]);
      swaps.emplace_back(i, j);
      const int f = perm_[i];
      if (evaluate_feature(samples, votes, f, best)) ++inspected;
    }
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) std::swap(perm_[it->first], perm_[it->second]);
    return best;
  }

  // Returns false when the feature is constant over the node.
  bool evaluate_feature(const std::vector<Sample>& samples, const std::array<double, 2>& votes, int f, Split& best) {
    column_.clear();
    for (const auto& s : samples)
      column_.push_back({d_.X(static_cast<Eigen::Index>(s.row), f), static_cast<int>(d_.y[s.row]), s.weight});
    std::sort(column_.begin(), column_.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    if (column_.front().value == column_.back().value) return false;

    std::array<double, 2> left{0, 0};
    for (std::size_t i = 0; i + 1 < column_.size(); ++i) {
      left[column_[i].label] += column_[i].weight;
      if (column_[i].value == column_[i + 1].value) continue;
      const double impurity = gini_weighted(left[0], left[1]) + gini_weighted(votes[0] - left[0], votes[1] - left[1]);
      if (impurity < best.impurity) {
        double t = 0.5 * (column_[i].value + column_[i + 1].value);
        if (!(t < column_[i + 1].value)) t = column_[i].value;
        best = {f, t, impurity};
      }
    }
    return true;
  }

  struct Cell {
    double value;
    int label;
    double weight;
  };

  const LabeledDataset& d_;
  const RandomForestParams& p_;
  std::size_t mtry_;
  std::vector<int> perm_;
  std::vector<Cell> column_;
  DecisionTree tree_;
};

}  // namespace

RandomForestModel train_random_forest(const LabeledDataset& d, const RandomForestParams& params, std::uint64_t seed,
                                      std::size_t workers) {
  d.validate();
  if (d.rows() < 2) throw Error("random forest needs at least two training rows");
  if (d.count(Label::malware) == 0 || d.count(Label::benign) == 0)
    throw Error("random forest training data must contain both classes");
  if (d.cols() == 0) throw Error("random forest needs at least one feature");
  if (params.n_trees == 0) throw Error("random forest needs at least one tree");
  if (params.bootstrap && !(params.bootstrap_rate > 0)) throw Error("bootstrap rate must be positive");

  RandomForestModel model;
  model.params = params;
  model.seed = seed;
  model.n_features = d.cols();
  const std::size_t mtry = std::clamp<std::size_t>(
      params.features_per_split ? params.features_per_split
                                : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d.cols())))),
      1, d.cols());
  model.trees.resize(params.n_trees);

  parallel_for(params.n_trees, workers, [&](std::size_t t) {
    const std::uint64_t tree_seed = mix_seed(seed, t);
    std::vector<Sample> samples;
    if (params.bootstrap) {
      std::mt19937_64 rng(tree_seed);
      std::uniform_int_distribution<std::size_t> pick(0, d.rows() - 1);
      const auto draws = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.bootstrap_rate * d.rows())));
      std::vector<double> weight(d.rows(), 0.0);
      for (std::size_t i = 0; i < draws; ++i) weight[pick(rng)] += 1.0;
      for (std::size_t r = 0; r < d.rows(); ++r)
        if (weight[r] > 0) samples.push_back({r, weight[r]});
    } else {
      for (std::size_t r = 0; r < d.rows(); ++r) samples.push_back({r, 1.0});
    }
    TreeBuilder builder(d, params, mtry);
    model.trees[t] = builder.build(std::move(samples), mix_seed(tree_seed, 0xF00D));
  });
  return model;
}

}  // namespace apichain
