#include "smash/pfsa.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <utility>

#include "chain.hpp"
#include "smash/error.hpp"

namespace smash {

Pfsa::Pfsa(std::size_t alphabet_size, std::vector<StateRecord> states)
    : alphabet_size_(alphabet_size), num_states_(states.size()) {
  probs_.reserve(num_states_ * alphabet_size_);
  next_.reserve(num_states_ * alphabet_size_);
  for (std::size_t q = 0; q < states.size(); ++q) {
    const auto& s = states[q];
    if (s.probs.size() != alphabet_size || s.next.size() != alphabet_size) {
      std::ostringstream msg;
      msg << "state " << q << ": expected " << alphabet_size
          << " probabilities and transitions, got " << s.probs.size() << " and "
          << s.next.size();
      throw InvalidModel(msg.str());
    }
    probs_.insert(probs_.end(), s.probs.begin(), s.probs.end());
    for (const auto& target : s.next) {
      next_.push_back(target.value_or(kNoState));
    }
  }
}

std::optional<StateIndex> Pfsa::next(StateIndex q, Symbol s) const {
  if (!has_next(q, s)) return std::nullopt;
  return next_unchecked(q, s);
}

StateRecord Pfsa::state(StateIndex q) const {
  StateRecord record;
  const auto r = row(q);
  record.probs.assign(r.begin(), r.end());
  record.next.reserve(alphabet_size_);
  for (Symbol s = 0; s < alphabet_size_; ++s) record.next.push_back(next(q, s));
  return record;
}

std::vector<StateRecord> Pfsa::states() const {
  std::vector<StateRecord> out;
  out.reserve(num_states_);
  for (StateIndex q = 0; q < num_states_; ++q) out.push_back(state(q));
  return out;
}

Adjacency Pfsa::graph() const {
  Adjacency adj(num_states_);
  for (StateIndex q = 0; q < num_states_; ++q) {
    for (Symbol s = 0; s < alphabet_size_; ++s) {
      if (has_next(q, s) && next_unchecked(q, s) < num_states_) {
        adj[q].push_back(next_unchecked(q, s));
      }
    }
  }
  return adj;
}

std::vector<Violation> validate(const Pfsa& m) {
  std::vector<Violation> out;
  if (m.num_states() == 0) {
    out.push_back({Violation::Kind::kNoStates, {}, {}, "machine has no states"});
    return out;
  }
  if (m.alphabet_size() < 2) {
    out.push_back({Violation::Kind::kAlphabetTooSmall, {}, {},
                   "alphabet size must be at least 2"});
  }
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    double sum = 0.0;
    for (Symbol s = 0; s < m.alphabet_size(); ++s) {
      const double p = m.prob(q, s);
      std::ostringstream where;
      where << "state " << q << ", symbol " << s;
      if (!(p >= 0.0) || !std::isfinite(p)) {
        out.push_back({Violation::Kind::kNegativeProbability, q, s,
                       where.str() + ": probability is negative or not finite"});
      }
      sum += p;
      if ((p > 0.0) != m.has_next(q, s)) {
        out.push_back({Violation::Kind::kTransitionDomain, q, s,
                       where.str() + (p > 0.0
                                          ? ": positive probability but no transition"
                                          : ": transition defined on a zero-probability symbol")});
      }
      if (m.has_next(q, s) && m.next_unchecked(q, s) >= m.num_states()) {
        out.push_back({Violation::Kind::kTargetOutOfRange, q, s,
                       where.str() + ": transition target out of range"});
      }
    }
    if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "state " << q << ": probabilities sum to " << sum;
      out.push_back({Violation::Kind::kRowSum, q, {}, msg.str()});
    }
  }
  const auto components = strongly_connected_components(m.graph());
  if (components.size() != 1) {
    out.push_back({Violation::Kind::kNotStronglyConnected, {}, {},
                   "graph has " + std::to_string(components.size()) +
                       " strongly connected components"});
  }
  return out;
}

void require_valid(const Pfsa& m) {
  const auto violations = validate(m);
  if (violations.empty()) return;
  std::string msg = "invalid PFSA:";
  for (const auto& v : violations) msg += "\n  " + v.message;
  throw InvalidModel(msg);
}

Eigen::MatrixXd transition_matrix(const Pfsa& m) {
  const auto n = static_cast<Eigen::Index>(m.num_states());
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, n);
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    for (Symbol s = 0; s < m.alphabet_size(); ++s) {
      if (m.has_next(q, s)) {
        pi(static_cast<Eigen::Index>(q),
           static_cast<Eigen::Index>(m.next_unchecked(q, s))) += m.prob(q, s);
      }
    }
  }
  return pi;
}

namespace {

// out = p * Pi without forming Pi.
void push_forward(const Pfsa& m, std::span<const double> p, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    if (p[q] == 0.0) continue;
    for (Symbol s = 0; s < m.alphabet_size(); ++s) {
      if (m.has_next(q, s)) out[m.next_unchecked(q, s)] += p[q] * m.prob(q, s);
    }
  }
}

double residual(const Pfsa& m, std::span<const double> p) {
  std::vector<double> moved(p.size());
  push_forward(m, p, moved);
  return detail::sup_distance(p, moved);
}

std::vector<double> direct_solve(const Pfsa& m) {
  const auto n = static_cast<Eigen::Index>(m.num_states());
  Eigen::MatrixXd a = transition_matrix(m).transpose();
  a -= Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  std::vector<double> p(x.data(), x.data() + n);
  double total = 0.0;
  for (double& v : p) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace

StateDist stationary_distribution(const Pfsa& m) {
  require_valid(m);
  const std::size_t n = m.num_states();
  if (n <= kDirectSolveLimit) {
    auto p = direct_solve(m);
    if (residual(m, p) <= kStationaryResidual) return {std::move(p)};
    // Ill-conditioned; polish below starting from the direct answer.
    return {detail::lazy_power_iteration(
        std::move(p),
        [&](std::span<const double> in, std::span<double> out) {
          push_forward(m, in, out);
        },
        kStationaryResidual, 1'000'000, "stationary distribution")};
  }
  return {detail::lazy_power_iteration(
      std::vector<double>(n, 1.0 / static_cast<double>(n)),
      [&](std::span<const double> in, std::span<double> out) {
        push_forward(m, in, out);
      },
      kStationaryResidual, 1'000'000, "stationary distribution")};
}

SymbolSeq sample(const Pfsa& m, std::size_t length, std::uint64_t seed,
                 std::optional<StateIndex> start) {
  require_valid(m);
  SymbolSeq out;
  if (length == 0) return out;
  std::mt19937_64 rng(seed);
  StateIndex q;
  if (start) {
    if (*start >= m.num_states()) {
      throw InvalidModel("start state " + std::to_string(*start) +
                         " out of range");
    }
    q = *start;
  } else {
    q = detail::draw_index(stationary_distribution(m).probs, rng);
  }
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const auto s = static_cast<Symbol>(detail::draw_index(m.row(q), rng));
    out.push_back(s);
    q = m.next_unchecked(q, s);
  }
  return out;
}

Minimization minimize_with_blocks(const Pfsa& m, double tolerance) {
  require_valid(m);
  const std::size_t n = m.num_states();
  const std::size_t k = m.alphabet_size();

  // Initial blocks: greedy grouping against each block's first member.
  std::vector<StateIndex> block(n);
  std::vector<StateIndex> representatives;
  for (StateIndex q = 0; q < n; ++q) {
    auto it = std::find_if(representatives.begin(), representatives.end(),
                           [&](StateIndex r) {
                             return detail::sup_distance(m.row(q), m.row(r)) <=
                                    tolerance;
                           });
    if (it == representatives.end()) {
      block[q] = representatives.size();
      representatives.push_back(q);
    } else {
      block[q] = static_cast<StateIndex>(it - representatives.begin());
    }
  }

  std::size_t block_count = representatives.size();
  constexpr StateIndex kNone = static_cast<StateIndex>(-1);
  for (;;) {
    std::map<std::vector<StateIndex>, StateIndex> ids;
    std::vector<StateIndex> refined(n);
    for (StateIndex q = 0; q < n; ++q) {
      std::vector<StateIndex> signature;
      signature.reserve(k + 1);
      signature.push_back(block[q]);
      for (Symbol s = 0; s < k; ++s) {
        signature.push_back(m.has_next(q, s) ? block[m.next_unchecked(q, s)]
                                             : kNone);
      }
      auto [it, inserted] = ids.try_emplace(std::move(signature), ids.size());
      refined[q] = it->second;
    }
    block = std::move(refined);
    if (ids.size() == block_count) break;
    block_count = ids.size();
  }

  std::vector<StateRecord> states(block_count);
  std::vector<bool> filled(block_count, false);
  for (StateIndex q = 0; q < n; ++q) {
    const StateIndex b = block[q];
    if (filled[b]) continue;
    filled[b] = true;
    StateRecord record = m.state(q);
    for (auto& target : record.next) {
      if (target) target = block[*target];
    }
    states[b] = std::move(record);
  }
  return {Pfsa(k, std::move(states)), std::move(block)};
}

Pfsa minimize(const Pfsa& m, double tolerance) {
  return minimize_with_blocks(m, tolerance).machine;
}

}  // namespace smash
