#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "apichain/abstraction.hpp"
#include "apichain/error.hpp"
#include "apichain/markov.hpp"
#include "apichain/pipeline.hpp"
#include "test_support.hpp"

using namespace apichain;

namespace {

StateSpace four() { return StateSpace(Mode::package, {"s0", "s1", "s2", "s3"}); }

std::vector<Transition> random_pairs(std::mt19937_64& rng, std::size_t n, std::size_t states) {
  std::vector<Transition> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({rng() % states, rng() % states, 1});
  return out;
}

}  // namespace

TEST_CASE("running example in family mode") {
  const auto g = parse_call_graph(testing::kRunningExample, "root");
  const Abstractor abs(testing::eval_catalog(), Mode::family);
  const auto v = featurize_graph(g, abs);
  const auto& s = abs.states();
  REQUIRE(v.values.size() == 64);
  const auto n = s.size();
  const auto sd = s.require("self-defined");
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = k == sd ? 0.5 : k == s.require("android") ? 0.25 : k == s.require("java") ? 0.25 : 0.0;
    CHECK(v.values[sd * n + k] == expected);
  }
  for (std::size_t j = 0; j < n; ++j)
    if (j != sd)
      for (std::size_t k = 0; k < n; ++k) CHECK(v.values[j * n + k] == 0.0);
}

TEST_CASE("running example in package mode") {
  const auto g = parse_call_graph(testing::kRunningExample, "root");
  const Abstractor abs(testing::eval_catalog(), Mode::package);
  const auto v = featurize_graph(g, abs);
  const auto& s = abs.states();
  REQUIRE(v.values.size() == 116281);
  const auto n = s.size();
  const auto sd = s.require("self-defined");
  CHECK(v.values[sd * n + sd] == 0.5);
  CHECK(v.values[sd * n + s.require("android.util")] == 0.25);
  CHECK(v.values[sd * n + s.require("java.lang")] == 0.25);
  CHECK(std::count_if(v.values.begin(), v.values.end(), [](double x) { return x != 0.0; }) == 3);
}

TEST_CASE("single transition") {
  const auto s = four();
  const std::vector<std::pair<AbstractState, AbstractState>> pairs{{{"s1"}, {"s2"}}};
  const auto c = build_chain(pairs, s);
  CHECK(c.prob(1, 2) == 1.0);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < 4; ++k)
      if (j != 1 || k != 2) CHECK(c.prob(j, k) == 0.0);
}

TEST_CASE("unknown states are rejected") {
  const std::vector<std::pair<AbstractState, AbstractState>> pairs{{{"s1"}, {"nope"}}};
  CHECK_THROWS_AS(build_chain(pairs, four()), Error);
  const std::vector<Transition> t{{0, 7, 1}};
  CHECK_THROWS_AS(build_chain(t, four()), Error);
}

TEST_CASE("1000 random pairs match a count-and-divide oracle") {
  std::mt19937_64 rng(42);
  const auto s = four();
  const auto pairs = random_pairs(rng, 1000, 4);
  const auto c = build_chain(pairs, s);

  std::uint64_t tally[4][4] = {};
  for (const auto& p : pairs) tally[p.from][p.to] += p.count;
  for (std::size_t j = 0; j < 4; ++j) {
    std::uint64_t row = 0;
    for (std::size_t k = 0; k < 4; ++k) row += tally[j][k];
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(c.count(j, k) == tally[j][k]);
      CHECK(c.prob(j, k) == (row ? static_cast<double>(tally[j][k]) / static_cast<double>(row) : 0.0));
    }
  }
}

TEST_CASE("zero chain and feature lengths") {
  const auto& cat = testing::eval_catalog();
  const auto fam = cat.state_space(Mode::family);
  const auto pkg = cat.state_space(Mode::package);
  CHECK(feature_vector(MarkovChain(fam.size()), fam).values == std::vector<double>(64, 0.0));
  const auto v = feature_vector(MarkovChain(pkg.size()), pkg);
  CHECK(v.values.size() == 116281);
  CHECK(std::all_of(v.values.begin(), v.values.end(), [](double x) { return x == 0.0; }));
}

TEST_CASE("rows are stochastic, duplication and permutation leave probabilities unchanged") {
  std::mt19937_64 rng(7);
  const auto s = four();
  for (int trial = 0; trial < 50; ++trial) {
    auto pairs = random_pairs(rng, 1 + rng() % 40, 4);
    const auto base = build_chain(pairs, s);
    for (std::size_t j = 0; j < 4; ++j) {
      double row = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        CHECK(base.prob(j, k) >= 0.0);
        CHECK(base.prob(j, k) <= 1.0);
        row += base.prob(j, k);
      }
      if (base.row_total(j)) CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
      else CHECK(row == 0.0);
    }

    auto doubled = pairs;
    doubled.insert(doubled.end(), pairs.begin(), pairs.end());
    const auto twice = build_chain(doubled, s);
    CHECK(std::equal(base.probs().begin(), base.probs().end(), twice.probs().begin()));

    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto shuffled = build_chain(pairs, s);
    CHECK(std::equal(base.counts().begin(), base.counts().end(), shuffled.counts().begin()));
    CHECK(std::equal(base.probs().begin(), base.probs().end(), shuffled.probs().begin()));
  }
}

TEST_CASE("unflatten inverts feature_vector") {
  std::mt19937_64 rng(8);
  const auto s = four();
  const auto c = build_chain(random_pairs(rng, 30, 4), s);
  const auto v = feature_vector(c, s, "x");
  CHECK(v.app_id == "x");
  const auto m = unflatten(v, s);
  REQUIRE(m.size() == 4);
  FeatureVector back{"x", {}};
  for (const auto& row : m) back.values.insert(back.values.end(), row.begin(), row.end());
  CHECK(back.values == v.values);
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < 4; ++k) CHECK(m[j][k] == c.prob(j, k));
}
