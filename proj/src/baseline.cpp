#include "apichain/baseline.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "apichain/error.hpp"
#include "apichain/knn.hpp"

namespace apichain::baseline {

std::vector<std::string> app_calls(const CallGraph& g) {
  std::set<std::string> calls;
  for (const auto& e : g.edges()) calls.insert(g.nodes()[e.to].api_call());
  return {calls.begin(), calls.end()};
}

const CallFrequency* FrequencyTable::find(const std::string& call) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), call,
                                   [](const CallFrequency& f, const std::string& c) { return f.call < c; });
  return it != entries.end() && it->call == call ? &*it : nullptr;
}

FrequencyTable build_frequency_table(std::span<const CallGraph> apps, std::span<const Label> labels) {
  if (apps.size() != labels.size()) throw Error("frequency table: apps and labels differ in length");
  FrequencyTable t;
  std::map<std::string, std::pair<std::size_t, std::size_t>> seen;  // malware, benign
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const bool malware = labels[i] == Label::malware;
    (malware ? t.malware_apps : t.benign_apps)++;
    for (auto& call : app_calls(apps[i])) {
      auto& c = seen[call];
      (malware ? c.first : c.second)++;
    }
  }
  if (t.malware_apps == 0 || t.benign_apps == 0) throw Error("frequency table needs both malware and benign apps");
  for (const auto& [call, c] : seen) {
    t.entries.push_back({call, static_cast<double>(c.first) / static_cast<double>(t.malware_apps),
                         static_cast<double>(c.second) / static_cast<double>(t.benign_apps)});
  }
  return t;
}

std::vector<std::string> select_features(const FrequencyTable& t, double min_gap, std::size_t top_n) {
  constexpr double eps = 1e-12;
  std::vector<const CallFrequency*> passing;
  for (const auto& e : t.entries)
    if (e.gap() >= min_gap - eps) passing.push_back(&e);
  std::sort(passing.begin(), passing.end(), [](const CallFrequency* a, const CallFrequency* b) {
    if (a->malware_fraction != b->malware_fraction) return a->malware_fraction > b->malware_fraction;
    return a->call < b->call;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < passing.size() && i < top_n; ++i) out.push_back(passing[i]->call);
  return out;
}

Eigen::MatrixXd presence_matrix(std::span<const CallGraph> apps, std::span<const std::string> features) {
  std::unordered_map<std::string, Eigen::Index> column;
  for (std::size_t j = 0; j < features.size(); ++j) column.emplace(features[j], static_cast<Eigen::Index>(j));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(apps.size()), static_cast<Eigen::Index>(features.size()));
  for (std::size_t i = 0; i < apps.size(); ++i) {
    for (const auto& call : app_calls(apps[i]))
      if (auto it = column.find(call); it != column.end()) m(static_cast<Eigen::Index>(i), it->second) = 1.0;
  }
  return m;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_two_thirds(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t cut = (2 * n + 2) / 3;
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

Result train_and_test(std::span<const CallGraph> apps, std::span<const Label> labels,
                      std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows) {
  if (apps.size() != labels.size()) throw Error("baseline: apps and labels differ in length");
  if (test_rows.empty()) throw Error("baseline: empty test split");
  if (train_rows.size() < kNeighbors) throw Error("baseline: training split smaller than k");

  std::vector<CallGraph> train_apps, test_apps;
  LabeledDataset train;
  std::vector<Label> test_labels;
  for (auto r : train_rows) {
    train_apps.push_back(apps[r]);
    train.y.push_back(labels[r]);
  }
  for (auto r : test_rows) {
    test_apps.push_back(apps[r]);
    test_labels.push_back(labels[r]);
  }

  Result res;
  res.train_rows.assign(train_rows.begin(), train_rows.end());
  res.test_rows.assign(test_rows.begin(), test_rows.end());
  res.features = select_features(build_frequency_table(train_apps, train.y));

  train.X = presence_matrix(train_apps, res.features);
  const Eigen::MatrixXd test_x = presence_matrix(test_apps, res.features);
  std::vector<Label> predicted;
  for (Eigen::Index i = 0; i < test_x.rows(); ++i)
    predicted.push_back(knn_predict(train, test_x.row(i).transpose(), kNeighbors));
  res.metrics = compute_metrics(test_labels, predicted);
  return res;
}

Result evaluate(std::span<const CallGraph> apps, std::span<const Label> labels, std::uint64_t seed) {
  const auto [train, test] = split_two_thirds(apps.size(), seed);
  return train_and_test(apps, labels, train, test);
}

}  // namespace apichain::baseline
