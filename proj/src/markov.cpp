#include "apichain/markov.hpp"

#include "apichain/error.hpp"

namespace apichain {

MarkovChain::MarkovChain(std::size_t states)
    : n_(states), counts_(states * states, 0), probs_(states * states, 0.0) {}

std::uint64_t MarkovChain::row_total(std::size_t from) const {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < n_; ++k) total += counts_[from * n_ + k];
  return total;
}

void MarkovChain::add(std::size_t from, std::size_t to, std::uint64_t count) {
  if (from >= n_ || to >= n_) throw Error("transition state index outside the state space");
  counts_[from * n_ + to] += count;
}

void MarkovChain::normalize() {
  for (std::size_t j = 0; j < n_; ++j) {
    const auto total = row_total(j);
    for (std::size_t k = 0; k < n_; ++k) {
      probs_[j * n_ + k] = total == 0 ? 0.0 : static_cast<double>(counts_[j * n_ + k]) / static_cast<double>(total);
    }
  }
}

MarkovChain build_chain(std::span<const Transition> transitions, const StateSpace& space) {
  MarkovChain chain(space.size());
  for (const auto& t : transitions) chain.add(t.from, t.to, t.count);
  chain.normalize();
  return chain;
}

MarkovChain build_chain(std::span<const std::pair<AbstractState, AbstractState>> pairs, const StateSpace& space) {
  MarkovChain chain(space.size());
  for (const auto& [from, to] : pairs) chain.add(space.require(from.name), space.require(to.name), 1);
  chain.normalize();
  return chain;
}

FeatureVector feature_vector(const MarkovChain& chain, const StateSpace& space, std::string app_id) {
  if (chain.size() != space.size()) throw Error("chain was not built over this state space");
  return {std::move(app_id), std::vector<double>(chain.probs().begin(), chain.probs().end())};
}

std::vector<std::vector<double>> unflatten(const FeatureVector& v, const StateSpace& space) {
  const auto n = space.size();
  if (v.values.size() != n * n) throw Error("feature vector length does not match the state space");
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) m[j][k] = v.values[j * n + k];
  return m;
}

}  // namespace apichain
