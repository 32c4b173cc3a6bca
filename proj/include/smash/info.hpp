#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "smash/pfsa.hpp"

namespace smash {

/// Step probabilities below this are clamped, and the filter resets to the
/// stationary distribution.
inline constexpr double kClampFloor = 1e-12;
inline constexpr double kJointResidual = 1e-10;

/// Shannon entropy of a distribution, in bits.
double entropy_bits(std::span<const double> dist);

/// D(p || q) in bits. Infinite when p puts mass where q has none.
double kl_bits(std::span<const double> p, std::span<const double> q);

/// Entropy rate in bits per symbol: stationary average of the per-state
/// observation entropies.
double entropy_rate(const Pfsa& m);

/// Stationary frequencies of the paired process in which a path generated by
/// g drives both g and h. Rows index g's states, columns h's.
///
/// The chain starts at p_g (x) uniform and is run to its (Cesaro) limit. When
/// h has no transition on a symbol g emits, h's side restarts from h's
/// stationary distribution, mirroring the likelihood filter's reset.
Eigen::MatrixXd joint_stationary(const Pfsa& g, const Pfsa& h);

struct Divergence {
  double bits = 0.0;
  /// Reachable state pairs where g emits a symbol h forbids; h's row was
  /// floored at kClampFloor and renormalized for those pairs.
  std::size_t smoothed_pairs = 0;
};

/// KL divergence rate D(g || h) in bits per symbol.
Divergence kl_divergence(const Pfsa& g, const Pfsa& h);

/// Probability that m (started from its stationary distribution) emits x.
/// Computed with the unnormalized forward recursion.
double seq_probability(const Pfsa& m, std::span<const Symbol> x);

struct FilterStep {
  StateDist next;
  double step_prob = 0.0;
  bool clamped = false;
};

/// One step of the observation-induced state distribution.
FilterStep filter_update(const Pfsa& m, const StateDist& p, Symbol s);

/// Streaming version of filter_update that reuses its buffers.
///
/// Holds a reference to the machine, which must outlive the filter.
class ForwardFilter {
 public:
  explicit ForwardFilter(const Pfsa& m);
  ForwardFilter(const Pfsa& m, StateDist stationary);

  /// Advances on s and returns the (possibly clamped) step probability.
  double step(Symbol s);

  std::span<const double> belief() const { return belief_; }
  std::size_t clamp_count() const { return clamps_; }
  void reset();

 private:
  const Pfsa& machine_;
  std::vector<double> stationary_;
  std::vector<double> belief_;
  std::vector<double> scratch_;
  std::size_t clamps_ = 0;
};

struct LogLikelihood {
  double bits_per_symbol = 0.0;
  std::size_t clamp_count = 0;
};

/// -(1/|x|) log2 Pr_m(x), accumulated one filter step at a time so it stays
/// finite for long x. Throws DataError on empty x.
LogLikelihood log_likelihood(std::span<const Symbol> x, const Pfsa& m);

/// Throws AlphabetMismatch if any symbol of x is outside m's alphabet.
void check_symbols(std::span<const Symbol> x, std::size_t alphabet_size);

}  // namespace smash
