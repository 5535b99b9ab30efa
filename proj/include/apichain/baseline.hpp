#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apichain/call_graph.hpp"
#include "apichain/dataset.hpp"
#include "apichain/metrics.hpp"

namespace apichain {

/// Frequency-analysis comparator: binary presence of the raw API calls most
/// common in malware, classified with 3-NN.
namespace baseline {

inline constexpr double kMinGap = 0.06;
inline constexpr std::size_t kTopN = 169;
inline constexpr std::size_t kNeighbors = 3;

/// Distinct raw calls (`package.Class: method`) an app invokes, i.e. its callees.
std::vector<std::string> app_calls(const CallGraph& g);

struct CallFrequency {
  std::string call;
  double malware_fraction = 0;
  double benign_fraction = 0;
  double gap() const noexcept { return malware_fraction - benign_fraction; }
};

/// Per-call presence fractions, sorted by call.
struct FrequencyTable {
  std::vector<CallFrequency> entries;
  std::size_t malware_apps = 0;
  std::size_t benign_apps = 0;

  const CallFrequency* find(const std::string& call) const;
};

FrequencyTable build_frequency_table(std::span<const CallGraph> apps, std::span<const Label> labels);

/// Calls whose malware-minus-benign gap is at least min_gap, ranked by malware
/// fraction (ties: lexicographic), truncated to top_n.
std::vector<std::string> select_features(const FrequencyTable& t, double min_gap = kMinGap, std::size_t top_n = kTopN);

/// Row i, column j is 1 when app i calls features[j].
Eigen::MatrixXd presence_matrix(std::span<const CallGraph> apps, std::span<const std::string> features);

struct Result {
  Metrics metrics;
  std::vector<std::string> features;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// Deterministic seeded 2/3 train, 1/3 test split of [0, n).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_two_thirds(std::size_t n, std::uint64_t seed);

/// Features selected on the training rows only, then 3-NN on presence vectors.
Result train_and_test(std::span<const CallGraph> apps, std::span<const Label> labels,
                      std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows);

/// Same-corpus protocol: seeded 2/3 - 1/3 split.
Result evaluate(std::span<const CallGraph> apps, std::span<const Label> labels, std::uint64_t seed);

}  // namespace baseline
}  // namespace apichain
