#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "smash/error.hpp"
#include "smash/genesess.hpp"
#include "smash/info.hpp"
#include "support/machines.hpp"
#include "support/oracles.hpp"

using namespace smash;
using namespace smash::testing;

namespace {

DerivativeCandidate candidate(const std::string& word, double p0, std::size_t support) {
  return {seq(word), {{p0, 1.0 - p0}, support}};
}

// Smallest sup-norm row mismatch over all state matchings (brute force).
double best_row_mismatch(const Pfsa& truth, const Pfsa& inferred) {
  std::vector<StateIndex> perm(inferred.num_states());
  std::iota(perm.begin(), perm.end(), StateIndex{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (StateIndex q = 0; q < truth.num_states(); ++q) {
      for (Symbol s = 0; s < truth.alphabet_size(); ++s) {
        worst = std::max(worst, std::abs(truth.prob(q, s) - inferred.prob(perm[q], s)));
      }
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_SUITE("genesess") {

TEST_CASE("empirical derivative examples") {
  const auto x = seq("0011");
  auto d0 = empirical_derivative(x, seq("0"), 2);
  CHECK(d0.support_count == 2);
  CHECK(d0.dist == std::vector<double>{.5, .5});

  auto d1 = empirical_derivative(x, seq("1"), 2);
  CHECK(d1.support_count == 1);
  CHECK(d1.dist == std::vector<double>{0.0, 1.0});

  auto lambda = empirical_derivative(x, {}, 2);
  CHECK(lambda.support_count == 4);
  CHECK(lambda.dist == std::vector<double>{.5, .5});

  auto none = empirical_derivative(x, seq("111"), 2);
  CHECK_FALSE(none.defined());
  CHECK(none.support_count == 0);

  SymbolSeq alternating;
  for (int i = 0; i < 10000; ++i) {
    alternating.push_back(0);
    alternating.push_back(1);
  }
  auto alt = empirical_derivative(alternating, seq("0"), 2);
  CHECK(alt.dist == std::vector<double>{0.0, 1.0});
}

TEST_CASE("empirical derivative matches the naive scan") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 3;
    SymbolSeq x(rng() % 300);
    for (auto& s : x) s = static_cast<Symbol>(rng() % k);
    SymbolSeq y(rng() % 4);
    for (auto& s : y) s = static_cast<Symbol>(rng() % k);
    const auto fast = empirical_derivative(x, y, k);
    const auto slow = naive_derivative(x, y, k);
    REQUIRE(fast.support_count == slow.support);
    for (std::size_t s = 0; s < k; ++s) {
      const double expected = slow.support ? slow.counts[s] / static_cast<double>(slow.support) : 0.0;
      CHECK(fast.dist[s] == expected);
    }
  }
}

TEST_CASE("hull vertex selection") {
  SUBCASE("farthest from centroid") {
    std::vector<DerivativeCandidate> c{candidate("", .5, 100), candidate("00", .9, 10),
                                       candidate("1", .2, 50)};
    CHECK(select_hull_vertex(c) == 1);
  }
  SUBCASE("ties prefer shorter, then better supported, then smaller words") {
    std::vector<DerivativeCandidate> c{candidate("", .5, 100), candidate("01", .9, 10),
                                       candidate("1", .9, 5), candidate("0", .9, 7),
                                       candidate("11", .1, 70)};
    // Points: .5, .9, .1 -> centroid .5; .9 and .1 tie at distance .4*sqrt2.
    CHECK(select_hull_vertex(c) == 3);
  }
  SUBCASE("empty candidate set") {
    CHECK_THROWS_AS(select_hull_vertex(std::vector<DerivativeCandidate>{}), DataError);
  }
}

TEST_CASE("sync sequence") {
  SUBCASE("a constant sequence synchronizes on the empty word") {
    const SymbolSeq x(500, 0);
    CHECK(select_sync_sequence(x, 2, {}).empty());
  }
  SUBCASE("binary: the chosen derivative is an extreme of P(0)") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto x = sample(machine_h(), 20000, seed);
      InferParams params;
      const auto candidates = sync_candidates(x, 2, params);
      const auto chosen = select_hull_vertex(candidates);
      double lo = 1.0, hi = 0.0;
      for (const auto& c : candidates) {
        lo = std::min(lo, c.derivative.dist[0]);
        hi = std::max(hi, c.derivative.dist[0]);
      }
      const double picked = candidates[chosen].derivative.dist[0];
      CHECK((picked == lo || picked == hi));
      // floor(log2(1 / .05)) = 4
      for (const auto& c : candidates) CHECK(c.word.size() <= 4);
    }
  }
  SUBCASE("word-length bound is exact at powers of the alphabet size") {
    const auto x = sample(machine_g(), 5000, 9);
    InferParams params;
    params.epsilon = 0.25;
    std::size_t longest = 0;
    for (const auto& c : sync_candidates(x, 2, params)) longest = std::max(longest, c.word.size());
    CHECK(longest == 2);
  }
  SUBCASE("too short") {
    CHECK_THROWS_AS(select_sync_sequence(seq("010"), 2, {}), DataError);
  }
}

TEST_CASE("terminal strongly connected component") {
  SUBCASE("transient root feeding a 2-cycle") {
    const Adjacency g{{1, 2}, {1, 2}, {1, 2}};
    CHECK(scc_terminal(g, std::vector<double>{1, 1, 1}) == std::vector<StateIndex>{1, 2});
  }
  SUBCASE("strongly connected graph") {
    const Adjacency g{{1}, {2}, {0}};
    CHECK(scc_terminal(g, std::vector<double>{0, 0, 0}) == std::vector<StateIndex>{0, 1, 2});
  }
  SUBCASE("two closed components: keep the heavier") {
    const Adjacency g{{1, 3}, {2}, {1}, {4}, {3}};
    CHECK(scc_terminal(g, std::vector<double>{0, .05, .05, .45, .45}) ==
          std::vector<StateIndex>{3, 4});
    CHECK(scc_terminal(g, std::vector<double>{0, .45, .45, .05, .05}) ==
          std::vector<StateIndex>{1, 2});
  }
}

TEST_CASE("infer recovers G") {
  const auto x = sample(machine_g(), 100'000, 1);
  const auto result = infer(x, 2, {});
  CHECK(validate(result.machine).empty());
  REQUIRE(result.machine.num_states() == 2);
  CHECK(best_row_mismatch(machine_g(), result.machine) <= .02);
  CHECK(kl_divergence(machine_g(), result.machine).bits <= .01);
  CHECK(result.report.state_count == 2);
  CHECK(result.report.visit_counts.size() == 2);
}

TEST_CASE("seed word is an epsilon-close, better supported stand-in for the sync word") {
  const auto x = sample(machine_h(), 200'000, 1);
  const auto result = infer(x, 2, {});
  const auto& r = result.report;
  CHECK(r.seed_word.size() <= r.sync_word.size());
  const auto sync = empirical_derivative(x, r.sync_word, 2);
  const auto seed = empirical_derivative(x, r.seed_word, 2);
  CHECK(seed.support_count >= sync.support_count);
  CHECK(std::abs(seed.dist[0] - sync.dist[0]) <= InferParams{}.epsilon);
}

TEST_CASE("infer recovers a fair coin") {
  const auto x = sample(fair_coin(), 10'000, 3);
  const auto result = infer(x, 2, {});
  REQUIRE(result.machine.num_states() == 1);
  CHECK(std::abs(result.machine.prob(0, 0) - .5) <= .02);
}

TEST_CASE("infer recovers H") {
  const auto x = sample(machine_h(), 200'000, 1);
  const auto result = infer(x, 2, {});
  CHECK(validate(result.machine).empty());
  CHECK(result.machine.num_states() == 4);
  CHECK(kl_divergence(machine_h(), result.machine).bits <= .01);
}

TEST_CASE("infer on a constant sequence gives one state") {
  const SymbolSeq x(1000, 1);
  const auto result = infer(x, 2, {});
  REQUIRE(result.machine.num_states() == 1);
  CHECK(result.machine.prob(0, 1) > .99);
  CHECK(validate(result.machine).empty());
}

TEST_CASE("infer with an absurd epsilon terminates and flags the merge") {
  const auto x = sample(machine_g(), 20'000, 4);
  InferParams params;
  params.epsilon = 0.9;
  const auto result = infer(x, 2, params);
  CHECK(result.machine.num_states() == 1);
  CHECK(result.report.coarse_merge);
  CHECK(validate(result.machine).empty());
}

TEST_CASE("infer honours max_states") {
  const auto x = sample(machine_h(), 50'000, 6);
  InferParams params;
  params.max_states = 2;
  params.merge_tolerance = 0.0;
  const auto result = infer(x, 2, params);
  CHECK(result.machine.num_states() <= 2);
  CHECK(result.report.capped_edges > 0);
  CHECK(validate(result.machine).empty());
}

TEST_CASE("infer without smoothing still yields a valid machine") {
  // Golden-mean shift: a 1 is always followed by a 0.
  Pfsa golden(2, {{{.5, .5}, {0, 1}}, {{1.0, 0.0}, {0, std::nullopt}}});
  const auto x = sample(golden, 50'000, 8);
  InferParams params;
  params.smoothing_alpha = 0.0;
  const auto result = infer(x, 2, params);
  CHECK(validate(result.machine).empty());
  CHECK(result.machine.num_states() == 2);
  CHECK(kl_divergence(golden, result.machine).bits <= .01);
}

TEST_CASE("infer rejects bad parameters and short input") {
  const auto x = sample(machine_g(), 1000, 1);
  InferParams bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(infer(x, 2, bad), InvalidArgument);
  bad = {};
  bad.min_count = 0;
  CHECK_THROWS_AS(infer(x, 2, bad), InvalidArgument);
  bad = {};
  bad.smoothing_alpha = -1;
  CHECK_THROWS_AS(infer(x, 2, bad), InvalidArgument);
  CHECK_THROWS_AS(infer(seq("0101"), 2, {}), DataError);
  CHECK_THROWS_AS(infer(seq("0121"), 2, {}), AlphabetMismatch);
}

TEST_CASE("short input warns but still infers") {
  const auto x = sample(machine_g(), 60, 2);
  const auto result = infer(x, 2, {});
  CHECK(validate(result.machine).empty());
  CHECK_FALSE(result.report.warnings.empty());
}

TEST_CASE("more data does not worsen the median divergence") {
  auto median_kl = [](std::size_t length) {
    std::vector<double> kls;
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
      const auto x = sample(machine_h(), length, seed);
      kls.push_back(kl_divergence(machine_h(), infer(x, 2, {}).machine).bits);
    }
    std::sort(kls.begin(), kls.end());
    return kls[2];
  };
  CHECK(median_kl(100'000) <= median_kl(50'000));
}

}  // TEST_SUITE
