#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "apichain/abstraction.hpp"
#include "apichain/call_graph.hpp"
#include "apichain/dataset.hpp"
#include "apichain/manifest.hpp"
#include "apichain/markov.hpp"

namespace apichain {

/// Wall-clock seconds per pipeline stage, summed over apps.
struct StageTimes {
  enum Stage { parse, abstract, markov, classify, count };
  std::array<double, count> seconds{};

  void add(Stage s, double sec) { seconds[s] += sec; }
  StageTimes& operator+=(const StageTimes& o);
  static std::string_view name(Stage s);
};

/// CSV `stage,seconds,fraction`.
void write_timing_csv(std::ostream& out, const StageTimes& t);

class ScopedTimer {
 public:
  ScopedTimer(StageTimes& t, StageTimes::Stage s) : t_(t), s_(s), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    t_.add(s_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  StageTimes& t_;
  StageTimes::Stage s_;
  std::chrono::steady_clock::time_point start_;
};

/// transitions -> abstraction -> Markov chain -> feature vector for one app.
FeatureVector featurize_graph(const CallGraph& g, const Abstractor& abstractor,
                              TraversalPolicy policy = TraversalPolicy::reachable_edge(), StageTimes* times = nullptr);

struct SkippedApp {
  std::string app_id;
  std::string reason;
};

struct FeaturizeResult {
  LabeledDataset data;
  std::vector<SkippedApp> skipped;
  std::vector<std::string> warnings;
  StageTimes times;
  std::vector<CallGraph> graphs;  // filled when requested, aligned with data rows
};

/// Apps that fail to load or parse are skipped and reported, not fatal; rows stay
/// in manifest order regardless of the worker count. Throws when every app fails.
FeaturizeResult featurize_manifest(const Manifest& m, const Abstractor& abstractor, TraversalPolicy policy,
                                   std::size_t workers = 1, bool keep_graphs = false);

/// CSV `app_id,reason`.
void write_skip_report(std::ostream& out, const std::vector<SkippedApp>& skipped);

}  // namespace apichain
