#include "apichain/call_graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "apichain/error.hpp"

namespace apichain {
namespace {

constexpr std::string_view kArrow = " -> ";

std::string edge_key(std::size_t from, std::size_t to) {
  return std::to_string(from) + ":" + std::to_string(to);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace

std::size_t CallGraph::add_node(const MethodRef& m) {
  auto [it, inserted] = node_index_.try_emplace(m.render(), nodes_.size());
  if (inserted) nodes_.push_back(m);
  return it->second;
}

void CallGraph::add_edge(const MethodRef& from, const MethodRef& to, std::size_t multiplicity) {
  const auto f = add_node(from);
  const auto t = add_node(to);
  add_edge(f, t, multiplicity);
}

void CallGraph::add_edge(std::size_t from, std::size_t to, std::size_t multiplicity) {
  if (from >= nodes_.size() || to >= nodes_.size()) throw Error("edge endpoint is not a node");
  if (multiplicity == 0) return;
  auto [it, inserted] = edge_index_.try_emplace(edge_key(from, to), edges_.size());
  if (inserted) {
    edges_.push_back({from, to, multiplicity});
  } else {
    edges_[it->second].multiplicity += multiplicity;
  }
}

std::optional<std::size_t> CallGraph::find(const MethodRef& m) const {
  if (auto it = node_index_.find(m.render()); it != node_index_.end()) return it->second;
  return std::nullopt;
}

std::size_t CallGraph::edge_count() const noexcept {
  std::size_t total = 0;
  for (const auto& e : edges_) total += e.multiplicity;
  return total;
}

std::vector<std::size_t> CallGraph::in_degrees() const {
  std::vector<std::size_t> deg(nodes_.size(), 0);
  for (const auto& e : edges_) deg[e.to] += e.multiplicity;
  return deg;
}

std::vector<std::vector<std::size_t>> CallGraph::out_edges() const {
  std::vector<std::vector<std::size_t>> adj(nodes_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) adj[edges_[i].from].push_back(i);
  return adj;
}

bool equivalent(const CallGraph& a, const CallGraph& b) {
  auto node_set = [](const CallGraph& g) {
    std::vector<std::string> out;
    for (const auto& n : g.nodes()) out.push_back(n.render());
    std::sort(out.begin(), out.end());
    return out;
  };
  auto edge_set = [](const CallGraph& g) {
    std::map<std::pair<std::string, std::string>, std::size_t> out;
    for (const auto& e : g.edges())
      out[{g.nodes()[e.from].render(), g.nodes()[e.to].render()}] += e.multiplicity;
    return out;
  };
  return node_set(a) == node_set(b) && edge_set(a) == edge_set(b);
}

CallGraph parse_call_graph(std::string_view text, std::string app_id) {
  CallGraph g(std::move(app_id));
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto arrow = line.find(kArrow);
    if (arrow == std::string_view::npos)
      throw ParseError(line_no, std::string(line), "missing ' -> ' edge separator");
    if (line.find(kArrow, arrow + kArrow.size()) != std::string_view::npos)
      throw ParseError(line_no, std::string(line), "more than one edge separator");
    try {
      g.add_edge(parse_method_ref(line.substr(0, arrow)),
                 parse_method_ref(line.substr(arrow + kArrow.size())));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, std::string(line), e.what());
    }
  }
  return g;
}

CallGraph load_call_graph(const std::string& path, std::string app_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open call graph '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_call_graph(buf.str(), std::move(app_id));
}

std::string render_call_graph(const CallGraph& g) {
  std::string out;
  for (const auto& e : g.edges()) {
    const std::string line = g.nodes()[e.from].render() + std::string(kArrow) + g.nodes()[e.to].render() + "\n";
    for (std::size_t i = 0; i < e.multiplicity; ++i) out += line;
  }
  return out;
}

std::vector<std::size_t> entry_nodes(const CallGraph& g) {
  const auto deg = g.in_degrees();
  const auto adj = g.out_edges();
  std::vector<char> reached(g.node_count(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (deg[v] == 0) {
      reached[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto ei : adj[u]) {
      const auto v = g.edges()[ei].to;
      if (!reached[v]) {
        reached[v] = 1;
        stack.push_back(v);
      }
    }
  }
  std::vector<std::size_t> entries;
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (deg[v] == 0 || !reached[v]) entries.push_back(v);
  return entries;
}

TraversalPolicy parse_policy(std::string_view text) {
  if (text == "reachable-edge") return TraversalPolicy::reachable_edge();
  if (text == "path-enum") return TraversalPolicy::path_enum();
  constexpr std::string_view prefix = "path-enum:";
  if (text.starts_with(prefix)) {
    std::size_t depth = 0;
    const auto digits = text.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), depth);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && depth > 0)
      return TraversalPolicy::path_enum(depth);
  }
  throw Error("unknown traversal policy '" + std::string(text) + "'");
}

std::string to_string(const TraversalPolicy& p) {
  if (p.kind == TraversalPolicy::Kind::reachable_edge) return "reachable-edge";
  return "path-enum:" + std::to_string(p.max_depth);
}

std::size_t TransitionMultiset::total() const noexcept {
  std::size_t t = 0;
  for (const auto& p : pairs) t += p.count;
  return t;
}

namespace {

class PathCounter {
 public:
  PathCounter(const CallGraph& g, std::size_t max_depth)
      : g_(g), adj_(g.out_edges()), on_path_(g.node_count(), 0), counts_(g.edges().size(), 0), max_depth_(max_depth) {}

  void run_from(std::size_t entry) {
    on_path_[entry] = 1;
    completions(entry, 0);
    on_path_[entry] = 0;
  }

  const std::vector<std::size_t>& counts() const { return counts_; }

 private:
  // Number of maximal simple paths extending the current prefix ending at u.
  std::size_t completions(std::size_t u, std::size_t depth) {
    if (depth >= max_depth_) return 1;
    std::size_t paths = 0;
    for (auto ei : adj_[u]) {
      const auto& e = g_.edges()[ei];
      if (on_path_[e.to]) continue;
      on_path_[e.to] = 1;
      const auto below = completions(e.to, depth + 1);
      on_path_[e.to] = 0;
      counts_[ei] += below * e.multiplicity;
      paths += below;
    }
    return paths == 0 ? 1 : paths;
  }

  const CallGraph& g_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<char> on_path_;
  std::vector<std::size_t> counts_;
  std::size_t max_depth_;
};

}  // namespace

TransitionMultiset transition_multiset(const CallGraph& g, TraversalPolicy policy) {
  TransitionMultiset out{{}, policy};
  const auto entries = entry_nodes(g);

  if (policy.kind == TraversalPolicy::Kind::reachable_edge) {
    const auto adj = g.out_edges();
    std::vector<char> reached(g.node_count(), 0);
    std::vector<std::size_t> stack(entries.begin(), entries.end());
    for (auto v : entries) reached[v] = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (auto ei : adj[u]) {
        const auto v = g.edges()[ei].to;
        if (!reached[v]) {
          reached[v] = 1;
          stack.push_back(v);
        }
      }
    }
    for (const auto& e : g.edges())
      if (reached[e.from]) out.pairs.push_back({e.from, e.to, e.multiplicity});
    return out;
  }

  PathCounter counter(g, policy.max_depth);
  for (auto entry : entries) counter.run_from(entry);
  const auto& counts = counter.counts();
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) out.pairs.push_back({g.edges()[i].from, g.edges()[i].to, counts[i]});
  return out;
}

}  // namespace apichain
