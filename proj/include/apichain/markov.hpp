#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apichain/call_graph.hpp"
#include "apichain/state_space.hpp"

namespace apichain {

/// Per-app transition counts O and row-normalized probabilities P over a state space.
/// Rows never observed as a source stay all-zero.
class MarkovChain {
 public:
  explicit MarkovChain(std::size_t states = 0);

  std::size_t size() const noexcept { return n_; }
  std::uint64_t count(std::size_t from, std::size_t to) const { return counts_[from * n_ + to]; }
  double prob(std::size_t from, std::size_t to) const { return probs_[from * n_ + to]; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t row_total(std::size_t from) const;

  void add(std::size_t from, std::size_t to, std::uint64_t count);
  void normalize();

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> probs_;
};

/// Throws when a transition refers to a state outside the space.
MarkovChain build_chain(std::span<const Transition> transitions, const StateSpace& space);
MarkovChain build_chain(std::span<const std::pair<AbstractState, AbstractState>> pairs, const StateSpace& space);

struct FeatureVector {
  std::string app_id;
  std::vector<double> values;
};

/// Row-major (source-major) flattening in state-space order; length |S|^2.
FeatureVector feature_vector(const MarkovChain& chain, const StateSpace& space, std::string app_id = {});
/// Inverse of feature_vector: the |S| x |S| probability matrix, row-major.
std::vector<std::vector<double>> unflatten(const FeatureVector& v, const StateSpace& space);

}  // namespace apichain
