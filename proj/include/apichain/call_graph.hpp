#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "apichain/method_ref.hpp"

namespace apichain {

/// A caller -> callee edge; multiplicity counts distinct call sites.
struct Edge {
  std::size_t from;
  std::size_t to;
  std::size_t multiplicity;
};

/// Directed multigraph of methods. Nodes and edges keep first-insertion order.
class CallGraph {
 public:
  explicit CallGraph(std::string app_id = {}) : app_id_(std::move(app_id)) {}

  std::size_t add_node(const MethodRef& m);
  void add_edge(const MethodRef& from, const MethodRef& to, std::size_t multiplicity = 1);
  void add_edge(std::size_t from, std::size_t to, std::size_t multiplicity = 1);

  const std::string& app_id() const noexcept { return app_id_; }
  std::span<const MethodRef> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::optional<std::size_t> find(const MethodRef& m) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  /// Sum of edge multiplicities.
  std::size_t edge_count() const noexcept;
  bool empty() const noexcept { return nodes_.empty(); }

  std::vector<std::size_t> in_degrees() const;
  /// Adjacency list of edge indices per source node.
  std::vector<std::vector<std::size_t>> out_edges() const;

 private:
  std::string app_id_;
  std::vector<MethodRef> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> node_index_;
  std::unordered_map<std::string, std::size_t> edge_index_;
};

/// Order-independent equality: same node set and same edge multiset.
bool equivalent(const CallGraph& a, const CallGraph& b);

/// Parses the line-oriented `.cg` format. Throws ParseError on a malformed line.
CallGraph parse_call_graph(std::string_view text, std::string app_id);
CallGraph load_call_graph(const std::string& path, std::string app_id);
/// One line per call site; parse_call_graph(render_call_graph(g)) is equivalent to g
/// whenever every node has an incident edge.
std::string render_call_graph(const CallGraph& g);

/// Nodes with in-degree 0, plus every node not reachable from one of them
/// (cyclic components with no natural entry). Sorted node indices.
std::vector<std::size_t> entry_nodes(const CallGraph& g);

struct TraversalPolicy {
  enum class Kind { reachable_edge, path_enum };
  Kind kind = Kind::reachable_edge;
  std::size_t max_depth = 64;

  static TraversalPolicy reachable_edge() { return {}; }
  static TraversalPolicy path_enum(std::size_t depth = 64) { return {Kind::path_enum, depth}; }
};

/// Parses `reachable-edge`, `path-enum` or `path-enum:<depth>`.
TraversalPolicy parse_policy(std::string_view text);
std::string to_string(const TraversalPolicy& p);

struct Transition {
  std::size_t from;
  std::size_t to;
  std::size_t count;
};

/// Caller -> callee pairs over node indices, aggregated with counts.
struct TransitionMultiset {
  std::vector<Transition> pairs;
  TraversalPolicy policy;

  std::size_t total() const noexcept;
};

/// reachable-edge: every edge whose source is reachable from an entry node,
/// counted with its multiplicity. path-enum: maximal simple paths from each entry
/// (capped at max_depth edges); each pair counts once per path through it, scaled
/// by the edge multiplicity.
TransitionMultiset transition_multiset(const CallGraph& g,
                                       TraversalPolicy policy = TraversalPolicy::reachable_edge());

}  // namespace apichain
