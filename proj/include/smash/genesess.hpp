#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "smash/graph.hpp"
#include "smash/pfsa.hpp"

namespace smash {

/// Next-symbol distribution after the occurrences of a word in a sequence.
struct EmpiricalDerivative {
  std::vector<double> dist;
  /// Occurrences of the word that are followed by at least one symbol.
  std::size_t support_count = 0;

  /// dist is meaningless (all zeros) when there is no support.
  bool defined() const { return support_count > 0; }
};

/// Counts every i with i + |y| < |x| and x[i, i + |y|) == y, and tallies the
/// symbol x[i + |y|] that follows.
EmpiricalDerivative empirical_derivative(std::span<const Symbol> x,
                                         std::span<const Symbol> y,
                                         std::size_t alphabet_size);

struct InferParams {
  /// Matching radius (sup norm) between derivatives.
  double epsilon = 0.05;
  /// Derivatives backed by fewer occurrences are not trusted.
  std::size_t min_count = 5;
  std::size_t max_states = 64;
  /// Pseudo-count added to every cell when estimating observation rows.
  double smoothing_alpha = 0.5;
  /// Rows within this sup distance are merged by a final minimization;
  /// negative means "use epsilon", zero disables the merge.
  double merge_tolerance = -1.0;
};

/// Throws InvalidArgument when a field is outside its domain.
void check_params(const InferParams& params);

struct DerivativeCandidate {
  SymbolSeq word;
  EmpiricalDerivative derivative;
};

/// Words of length <= floor(log_|alphabet|(1 / epsilon)) occurring in x with
/// support >= min_count, shortest first and lexicographic within a length.
std::vector<DerivativeCandidate> sync_candidates(std::span<const Symbol> x,
                                                 std::size_t alphabet_size,
                                                 const InferParams& params);

/// Index of the candidate whose derivative is farthest (Euclidean) from the
/// centroid of the distinct derivatives. The farthest point of a finite set
/// from any fixed point is a vertex of the set's convex hull. Ties go to the
/// shorter word, then the higher support, then the lexicographically smaller
/// word. Throws DataError on an empty list.
std::size_t select_hull_vertex(std::span<const DerivativeCandidate> candidates);

/// Approximate epsilon-synchronizing word. Throws DataError when no candidate
/// has enough support.
SymbolSeq select_sync_sequence(std::span<const Symbol> x,
                               std::size_t alphabet_size,
                               const InferParams& params);

/// Picks the closed strongly connected component with the largest total
/// visit mass (ties: the one containing the smallest state index).
std::vector<StateIndex> scc_terminal(const Adjacency& graph,
                                     std::span<const double> visit_mass);

struct InferReport {
  SymbolSeq sync_word;
  /// Identifier of the first state: the best-supported candidate whose
  /// derivative lies within epsilon of the sync word's.
  SymbolSeq seed_word;
  std::size_t candidate_count = 0;
  /// Spread (largest pairwise sup distance) of the candidate derivatives.
  double candidate_spread = 0.0;
  /// Epsilon is at least the candidate spread, so every history collapses
  /// into one state.
  bool coarse_merge = false;
  std::size_t discovered_states = 0;
  /// Edges whose extended word lacked support and were routed by suffix.
  std::size_t low_support_edges = 0;
  /// Edges routed to the closest state because max_states was reached.
  std::size_t capped_edges = 0;
  std::size_t closed_components = 0;
  std::size_t merged_states = 0;
  std::size_t state_count = 0;
  std::vector<std::size_t> visit_counts;
  std::vector<std::string> warnings;
};

struct InferResult {
  Pfsa machine;
  InferReport report;
};

/// Soft lower bound on |x|; shorter input only produces a warning.
inline constexpr std::size_t kRecommendedMinLength = 100;

/// Infers a PFSA from one symbol sequence:
///  1. pick an approximate synchronizing word,
///  2. grow states breadth-first from it by matching derivatives of extended
///     words within epsilon, keep the terminal strongly connected component,
///  3. estimate observation rows by running x through the graph.
InferResult infer(std::span<const Symbol> x, std::size_t alphabet_size,
                  const InferParams& params = {});

std::string format_report(const InferReport& report);

}  // namespace smash
