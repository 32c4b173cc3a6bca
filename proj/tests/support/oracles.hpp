#pragma once

// Brute-force reference computations. None of these call into the library's
// solvers or filters; they only read machine structure.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smash/metric.hpp"
#include "smash/pfsa.hpp"

namespace smash::testing {

/// Rows of ((I + Pi) / 2)^(2^60) all equal the stationary distribution.
/// Rows are renormalized after each squaring so rounding cannot compound.
inline std::vector<double> brute_stationary(const Pfsa& m) {
  const auto n = static_cast<Eigen::Index>(m.num_states());
  Eigen::MatrixXd lazy = Eigen::MatrixXd::Identity(n, n) * 0.5;
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    for (Symbol s = 0; s < m.alphabet_size(); ++s) {
      if (auto t = m.next(q, s)) {
        lazy(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(*t)) +=
            0.5 * m.prob(q, s);
      }
    }
  }
  for (int i = 0; i < 60; ++i) {
    lazy = (lazy * lazy).eval();
    for (Eigen::Index r = 0; r < n; ++r) lazy.row(r) /= lazy.row(r).sum();
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index q = 0; q < n; ++q) out[static_cast<std::size_t>(q)] = lazy(0, q);
  return out;
}

/// Sum over start states of start weight times the product of emission
/// probabilities along the unique path.
inline double path_probability(const Pfsa& m, const std::vector<double>& start,
                               const SymbolSeq& x) {
  double total = 0.0;
  for (StateIndex q0 = 0; q0 < m.num_states(); ++q0) {
    double p = start[q0];
    StateIndex q = q0;
    for (Symbol s : x) {
      if (p == 0.0) break;
      auto t = m.next(q, s);
      if (!t) {
        p = 0.0;
        break;
      }
      p *= m.prob(q, s);
      q = *t;
    }
    total += p;
  }
  return total;
}

/// Every word of length d over k symbols, in lexicographic order.
inline std::vector<SymbolSeq> all_words(std::size_t k, std::size_t d) {
  std::vector<SymbolSeq> words{SymbolSeq{}};
  for (std::size_t len = 0; len < d; ++len) {
    std::vector<SymbolSeq> longer;
    longer.reserve(words.size() * k);
    for (const auto& w : words) {
      for (Symbol s = 0; s < k; ++s) {
        auto e = w;
        e.push_back(s);
        longer.push_back(std::move(e));
      }
    }
    words = std::move(longer);
  }
  return words;
}

/// Block entropy H(X_1..X_d) in bits.
inline double block_entropy(const Pfsa& m, std::size_t d) {
  const auto p0 = brute_stationary(m);
  double h = 0.0;
  for (const auto& w : all_words(m.alphabet_size(), d)) {
    const double p = path_probability(m, p0, w);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// Block divergence D(g_d || h_d) in bits.
inline double block_kl(const Pfsa& g, const Pfsa& h, std::size_t d) {
  const auto pg = brute_stationary(g);
  const auto ph = brute_stationary(h);
  double kl = 0.0;
  for (const auto& w : all_words(g.alphabet_size(), d)) {
    const double a = path_probability(g, pg, w);
    if (a <= 0.0) continue;
    const double b = path_probability(h, ph, w);
    if (b <= 0.0) return std::numeric_limits<double>::infinity();
    kl += a * std::log2(a / b);
  }
  return kl;
}

/// True when every pair of states can be driven to a common state by some
/// word (backward search on the pair graph from the diagonal).
inline bool synchronizing(const Pfsa& m) {
  const std::size_t n = m.num_states();
  std::vector<char> reached(n * n, 0);
  std::vector<std::size_t> frontier;
  for (StateIndex q = 0; q < n; ++q) {
    reached[q * n + q] = 1;
    frontier.push_back(q * n + q);
  }
  while (!frontier.empty()) {
    std::vector<std::size_t> next;
    for (StateIndex a = 0; a < n; ++a) {
      for (StateIndex b = 0; b < n; ++b) {
        if (reached[a * n + b]) continue;
        for (Symbol s = 0; s < m.alphabet_size(); ++s) {
          auto ta = m.next(a, s);
          auto tb = m.next(b, s);
          if (ta && tb && reached[*ta * n + *tb]) {
            reached[a * n + b] = 1;
            next.push_back(a * n + b);
            break;
          }
        }
      }
    }
    frontier = std::move(next);
  }
  for (char r : reached) {
    if (!r) return false;
  }
  return true;
}

struct NaiveDerivative {
  std::vector<double> counts;
  std::size_t support = 0;
};

/// O(|x| |y|) scan for occurrences of y that have a following symbol.
inline NaiveDerivative naive_derivative(const SymbolSeq& x, const SymbolSeq& y,
                                        std::size_t k) {
  NaiveDerivative out;
  out.counts.assign(k, 0.0);
  for (std::size_t i = 0; i + y.size() < x.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < y.size() && match; ++j) match = x[i + j] == y[j];
    if (!match) continue;
    out.counts[x[i + y.size()]] += 1.0;
    ++out.support;
  }
  return out;
}

/// Leave-one-out nearest-neighbour label accuracy.
inline double loo_1nn_accuracy(const DistMatrix& d, const std::vector<std::string>& labels) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::size_t best = i;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (j != i && d(i, j) < best_d) {
        best_d = d(i, j);
        best = j;
      }
    }
    if (labels[best] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

/// Words typed as strings of digits, e.g. seq("0110").
inline SymbolSeq seq(const std::string& digits) {
  SymbolSeq out;
  for (char c : digits) out.push_back(static_cast<Symbol>(c - '0'));
  return out;
}

}  // namespace smash::testing
