#include "apichain/abstraction.hpp"

#include <map>

namespace apichain {

bool is_obfuscated(const MethodRef& m, const ObfuscationParams& params) {
  const auto dot = m.package.rfind('.');
  const auto last_segment = dot == std::string::npos ? m.package.size() : m.package.size() - dot - 1;
  return m.class_name.size() <= params.class_len && last_segment <= params.segment_len;
}

namespace {

std::string_view unknown_state(const MethodRef& m, const PackageCatalog& catalog) {
  return is_obfuscated(m, catalog.obfuscation()) ? kObfuscated : kSelfDefined;
}

}  // namespace

AbstractState abstract_to_package(const MethodRef& m, const PackageCatalog& catalog) {
  if (auto p = catalog.match(m.qualified_class())) return {catalog.packages()[*p].prefix};
  return {std::string(unknown_state(m, catalog))};
}

std::optional<AbstractState> abstract_to_family(const MethodRef& m, const PackageCatalog& catalog) {
  if (auto p = catalog.match(m.qualified_class())) {
    const auto& family = catalog.families()[catalog.packages()[*p].family];
    if (!family.active) return std::nullopt;
    return AbstractState{family.name};
  }
  return AbstractState{std::string(unknown_state(m, catalog))};
}

Abstractor::Abstractor(const PackageCatalog& catalog, Mode mode)
    : catalog_(&catalog),
      states_(catalog.state_space(mode)),
      self_defined_(states_.require(kSelfDefined)),
      obfuscated_(states_.require(kObfuscated)) {
  package_state_.reserve(catalog.packages().size());
  for (const auto& p : catalog.packages()) {
    if (mode == Mode::package) {
      package_state_.push_back(states_.require(p.prefix));
    } else {
      const auto& family = catalog.families()[p.family];
      package_state_.push_back(family.active ? std::optional(states_.require(family.name)) : std::nullopt);
    }
  }
}

std::optional<std::size_t> Abstractor::state_of(const MethodRef& m) const {
  if (auto p = catalog_->match(m.qualified_class())) return package_state_[*p];
  return is_obfuscated(m, catalog_->obfuscation()) ? obfuscated_ : self_defined_;
}

std::vector<Transition> Abstractor::abstract_transitions(const CallGraph& g, const TransitionMultiset& t) const {
  std::vector<std::optional<std::size_t>> node_state;
  node_state.reserve(g.node_count());
  for (const auto& n : g.nodes()) node_state.push_back(state_of(n));

  std::map<std::pair<std::size_t, std::size_t>, std::size_t> merged;
  for (const auto& p : t.pairs) {
    const auto& from = node_state[p.from];
    const auto& to = node_state[p.to];
    if (from && to) merged[{*from, *to}] += p.count;
  }
  std::vector<Transition> out;
  out.reserve(merged.size());
  for (const auto& [key, count] : merged) out.push_back({key.first, key.second, count});
  return out;
}

}  // namespace apichain
