#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "apichain/call_graph.hpp"
#include "apichain/catalog.hpp"
#include "apichain/method_ref.hpp"
#include "apichain/state_space.hpp"

namespace apichain {

/// Name-mangling heuristic for packages outside the catalog: short class name
/// and short last package segment.
bool is_obfuscated(const MethodRef& m, const ObfuscationParams& params = {});

AbstractState abstract_to_package(const MethodRef& m, const PackageCatalog& catalog);

/// nullopt when the call belongs to an inactive family; such calls are dropped
/// together with every transition that touches them.
std::optional<AbstractState> abstract_to_family(const MethodRef& m, const PackageCatalog& catalog);

/// Catalog + mode bound to a state space; maps methods straight to state indices.
class Abstractor {
 public:
  Abstractor(const PackageCatalog& catalog, Mode mode);

  Mode mode() const noexcept { return states_.mode(); }
  const StateSpace& states() const noexcept { return states_; }
  const PackageCatalog& catalog() const noexcept { return *catalog_; }

  std::optional<std::size_t> state_of(const MethodRef& m) const;

  /// Abstracts both endpoints of every pair and merges equal state pairs.
  /// Pairs with a dropped endpoint disappear; no re-joining across them.
  std::vector<Transition> abstract_transitions(const CallGraph& g, const TransitionMultiset& t) const;

 private:
  const PackageCatalog* catalog_;
  StateSpace states_;
  std::vector<std::optional<std::size_t>> package_state_;
  std::size_t self_defined_;
  std::size_t obfuscated_;
};

}  // namespace apichain
