#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smash/graph.hpp"

namespace smash {

/// Symbols are dense integers 0..alphabet_size-1.
using Symbol = std::uint32_t;
using SymbolSeq = std::vector<Symbol>;

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kEquivalenceTolerance = 1e-9;

/// One state of a machine: its observation distribution over the alphabet and
/// the symbol-labelled successor, defined exactly where the probability is
/// positive.
struct StateRecord {
  std::vector<double> probs;
  std::vector<std::optional<StateIndex>> next;

  bool operator==(const StateRecord&) const = default;
};

/// Probability vector over the states of one machine.
struct StateDist {
  std::vector<double> probs;
};

/// Probabilistic finite-state automaton: from state q, emit symbol s with
/// probability prob(q, s), then move to next(q, s).
///
/// Construction only checks dimensions. Semantic invariants (stochastic rows,
/// transition domain, strong connectivity) are reported by validate(); most
/// algorithms require a valid machine.
class Pfsa {
 public:
  Pfsa(std::size_t alphabet_size, std::vector<StateRecord> states);

  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t num_states() const { return num_states_; }

  double prob(StateIndex q, Symbol s) const {
    return probs_[q * alphabet_size_ + s];
  }
  std::span<const double> row(StateIndex q) const {
    return {probs_.data() + q * alphabet_size_, alphabet_size_};
  }
  bool has_next(StateIndex q, Symbol s) const {
    return next_[q * alphabet_size_ + s] != kNoState;
  }
  /// Successor of q on s; only meaningful when has_next(q, s).
  StateIndex next_unchecked(StateIndex q, Symbol s) const {
    return next_[q * alphabet_size_ + s];
  }
  std::optional<StateIndex> next(StateIndex q, Symbol s) const;

  StateRecord state(StateIndex q) const;
  std::vector<StateRecord> states() const;

  /// Edges of the machine's graph as successor lists (one entry per defined
  /// transition).
  Adjacency graph() const;

  bool operator==(const Pfsa& other) const = default;

 private:
  static constexpr StateIndex kNoState = static_cast<StateIndex>(-1);

  std::size_t alphabet_size_;
  std::size_t num_states_;
  std::vector<double> probs_;     // row-major, num_states x alphabet_size
  std::vector<StateIndex> next_;  // row-major, kNoState where undefined
};

struct Violation {
  enum class Kind {
    kNoStates,
    kAlphabetTooSmall,
    kNegativeProbability,
    kRowSum,
    kTransitionDomain,
    kTargetOutOfRange,
    kNotStronglyConnected,
  };
  Kind kind;
  std::optional<StateIndex> state;
  std::optional<Symbol> symbol;
  std::string message;
};

/// Every invariant violation of m; empty iff m is a valid machine.
std::vector<Violation> validate(const Pfsa& m);

/// Throws InvalidModel listing the violations, if any.
void require_valid(const Pfsa& m);

/// Entry (q, q') is the total probability of the symbols leading q to q'.
Eigen::MatrixXd transition_matrix(const Pfsa& m);

/// Unique stationary distribution of a valid machine's transition matrix.
/// Direct solve up to kDirectSolveLimit states, lazy-chain power iteration
/// beyond. Throws ConvergenceError if the residual target is not met.
StateDist stationary_distribution(const Pfsa& m);

inline constexpr std::size_t kDirectSolveLimit = 512;
inline constexpr double kStationaryResidual = 1e-12;

/// Draws `length` symbols. The initial state is drawn from the stationary
/// distribution unless `start` is given. Deterministic in (m, length, seed,
/// start) on every platform: the generator is std::mt19937_64 and uniforms
/// are built from its raw 53 high bits.
SymbolSeq sample(const Pfsa& m, std::size_t length, std::uint64_t seed,
                 std::optional<StateIndex> start = std::nullopt);

struct Minimization {
  Pfsa machine;
  /// State of `machine` that each original state was merged into.
  std::vector<StateIndex> block_of;
};

/// Partition refinement. Initial blocks group states whose rows agree within
/// `tolerance` in the sup norm; blocks are split until every member agrees on
/// the block of each successor. Blocks are numbered by first member, so a
/// machine without equivalent states comes back unchanged.
Minimization minimize_with_blocks(const Pfsa& m,
                                  double tolerance = kEquivalenceTolerance);

Pfsa minimize(const Pfsa& m, double tolerance = kEquivalenceTolerance);

}  // namespace smash
