#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "smash/pfsa.hpp"

namespace smash::testing {

inline StateRecord binary_state(double p0, StateIndex on0, StateIndex on1) {
  return {{p0, 1.0 - p0}, {on0, on1}};
}

/// Order-one Markov chain: P(0 | last 0) = .6, P(0 | last 1) = .4.
inline Pfsa machine_g() {
  return Pfsa(2, {binary_state(.6, 0, 1), binary_state(.4, 0, 1)});
}

/// Order-two Markov chain on states q00, q01, q10, q11 with
/// P(0 | ab) = .3, .2, .8, .7 and q_ab --s--> q_bs.
inline Pfsa machine_h() {
  return Pfsa(2, {binary_state(.3, 0, 1), binary_state(.2, 2, 3),
                  binary_state(.8, 0, 1), binary_state(.7, 2, 3)});
}

inline Pfsa fair_coin() { return Pfsa(2, {binary_state(.5, 0, 0)}); }

/// G with q0 split into two equivalent copies that share its incoming edges.
inline Pfsa duplicated_g() {
  return Pfsa(2, {binary_state(.6, 1, 2), binary_state(.6, 0, 2),
                  binary_state(.4, 0, 2)});
}

/// Random valid machine. A random Hamiltonian cycle on one symbol per state
/// keeps the graph strongly connected; other symbols get random targets and,
/// when `allow_zeros`, are sometimes forbidden.
inline Pfsa random_pfsa(std::mt19937_64& rng, std::size_t states, std::size_t symbols,
                        bool allow_zeros = true) {
  std::vector<StateIndex> order(states);
  std::iota(order.begin(), order.end(), StateIndex{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<StateIndex> cycle_next(states);
  for (std::size_t i = 0; i < states; ++i) {
    cycle_next[order[i]] = order[(i + 1) % states];
  }
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::uniform_int_distribution<std::size_t> pick_state(0, states - 1);
  std::uniform_int_distribution<std::size_t> pick_symbol(0, symbols - 1);
  std::bernoulli_distribution forbid(0.25);

  std::vector<StateRecord> records(states);
  for (StateIndex q = 0; q < states; ++q) {
    auto& r = records[q];
    r.probs.assign(symbols, 0.0);
    r.next.assign(symbols, std::nullopt);
    const std::size_t cycle_symbol = pick_symbol(rng);
    double total = 0.0;
    for (std::size_t s = 0; s < symbols; ++s) {
      if (s != cycle_symbol && allow_zeros && forbid(rng)) continue;
      r.probs[s] = weight(rng);
      r.next[s] = s == cycle_symbol ? cycle_next[q] : pick_state(rng);
      total += r.probs[s];
    }
    for (double& p : r.probs) p /= total;
  }
  return Pfsa(symbols, std::move(records));
}

}  // namespace smash::testing
