#include "apichain/pipeline.hpp"

#include <optional>
#include <ostream>

#include "apichain/error.hpp"
#include "apichain/feature_csv.hpp"
#include "apichain/parallel.hpp"

namespace apichain {

StageTimes& StageTimes::operator+=(const StageTimes& o) {
  for (std::size_t i = 0; i < seconds.size(); ++i) seconds[i] += o.seconds[i];
  return *this;
}

std::string_view StageTimes::name(Stage s) {
  switch (s) {
    case parse: return "parse";
    case abstract: return "abstract";
    case markov: return "markov";
    case classify: return "classify";
    default: return "?";
  }
}

void write_timing_csv(std::ostream& out, const StageTimes& t) {
  double total = 0;
  for (double s : t.seconds) total += s;
  out << "stage,seconds,fraction\n";
  for (int s = 0; s < StageTimes::count; ++s) {
    const auto stage = static_cast<StageTimes::Stage>(s);
    out << StageTimes::name(stage) << ',' << format_value(t.seconds[s]) << ','
        << format_value(total > 0 ? t.seconds[s] / total : 0.0) << '\n';
  }
}

FeatureVector featurize_graph(const CallGraph& g, const Abstractor& abstractor, TraversalPolicy policy,
                              StageTimes* times) {
  StageTimes local;
  StageTimes& t = times ? *times : local;
  std::vector<Transition> transitions;
  {
    ScopedTimer timer(t, StageTimes::abstract);
    transitions = abstractor.abstract_transitions(g, transition_multiset(g, policy));
  }
  ScopedTimer timer(t, StageTimes::markov);
  return feature_vector(build_chain(transitions, abstractor.states()), abstractor.states(), g.app_id());
}

void write_skip_report(std::ostream& out, const std::vector<SkippedApp>& skipped) {
  out << "app_id,reason\n";
  for (const auto& s : skipped) {
    std::string reason = s.reason;
    for (auto& c : reason)
      if (c == ',' || c == '\n' || c == '\r') c = ' ';
    out << s.app_id << ',' << reason << '\n';
  }
}

FeaturizeResult featurize_manifest(const Manifest& m, const Abstractor& abstractor, TraversalPolicy policy,
                                   std::size_t workers, bool keep_graphs) {
  struct Slot {
    std::optional<FeatureVector> features;
    std::optional<CallGraph> graph;
    std::string error;
    bool empty = false;
    StageTimes times;
  };
  std::vector<Slot> slots(m.entries.size());
  parallel_for(m.entries.size(), workers, [&](std::size_t i) {
    auto& slot = slots[i];
    const auto& e = m.entries[i];
    try {
      CallGraph g;
      {
        ScopedTimer timer(slot.times, StageTimes::parse);
        g = load_call_graph(m.resolve(e).string(), e.app_id);
      }
      slot.empty = g.empty();
      slot.features = featurize_graph(g, abstractor, policy, &slot.times);
      if (keep_graphs) slot.graph = std::move(g);
    } catch (const Error& err) {
      slot.error = err.what();
    }
  });

  FeaturizeResult out;
  const auto d = static_cast<Eigen::Index>(abstractor.states().feature_count());
  std::size_t ok = 0;
  for (const auto& s : slots) ok += s.features.has_value();
  out.data.X.resize(static_cast<Eigen::Index>(ok), d);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto& s = slots[i];
    const auto& e = m.entries[i];
    out.times += s.times;
    if (!s.features) {
      out.skipped.push_back({e.app_id, s.error});
      continue;
    }
    if (s.empty) out.warnings.push_back("app '" + e.app_id + "' has an empty call graph; its feature row is all zero");
    out.data.X.row(row++) = Eigen::Map<const Eigen::RowVectorXd>(s.features->values.data(), d);
    s.features.reset();
    out.data.y.push_back(e.label);
    out.data.epoch.push_back(e.epoch);
    out.data.app_ids.push_back(e.app_id);
    if (keep_graphs) out.graphs.push_back(std::move(*s.graph));
  }
  if (!m.entries.empty() && ok == 0) throw Error("every app in the manifest failed to parse");
  return out;
}

}  // namespace apichain
