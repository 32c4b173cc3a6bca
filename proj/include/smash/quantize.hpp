#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smash/metric.hpp"
#include "smash/pfsa.hpp"

namespace smash {

/// How a real-valued series becomes symbols: difference it `detrend` times,
/// optionally standardize it, then map each value p to the index i with
/// p in [cutoffs[i-1], cutoffs[i]) (open-ended at both extremes).
///
/// Text form: D<detrend>N<0|1>[<cutoff> <cutoff> ...], e.g. D1N1[3.].
struct QuantScheme {
  std::size_t detrend = 0;
  bool normalize = false;
  std::vector<double> cutoffs;

  std::size_t alphabet_size() const { return cutoffs.size() + 1; }
  bool operator==(const QuantScheme&) const = default;
};

/// Throws ParseError naming the offending token. Runs of blanks between
/// cutoffs (and inside the brackets) are accepted.
QuantScheme parse_scheme(std::string_view text);

/// Canonical text: single spaces, shortest round-trip decimal for each cutoff,
/// and a trailing '.' on integral values ("3.").
std::string format_scheme(const QuantScheme& scheme);

/// Throws InvalidArgument unless cutoffs are finite, nonempty and strictly
/// increasing.
void check_scheme(const QuantScheme& scheme);

/// Differencing and optional per-series standardization (mean 0, population
/// variance 1). Throws DataError if the series is too short or, when
/// normalizing, has zero variance.
std::vector<double> transform_series(std::span<const double> x, std::size_t detrend,
                                     bool normalize);

/// Output length is |x| - detrend.
SymbolSeq apply_scheme(std::span<const double> x, const QuantScheme& scheme);

struct LabeledDataset {
  std::vector<std::vector<double>> series;
  /// Empty, or one label per series.
  std::vector<std::string> labels;
};

/// Entropy-maximizing cutoffs: the empirical quantiles at i/k (shifted by
/// `quantile_shift`, clamped into (0, 1)) of the pooled transformed values.
/// Cutoffs that collide on tied values are pushed to the next distinct value.
/// Throws DataError when fewer than k distinct values are available.
std::vector<double> maxent_partition(const LabeledDataset& data, std::size_t detrend,
                                     bool normalize, std::size_t k,
                                     double quantile_shift = 0.0);

/// Same-label and cross-label average distances over all ordered pairs
/// (the diagonal included), and their ratio. Smaller ratio means better
/// separated classes.
struct ClassSeparation {
  double same = 0.0;
  double cross = 0.0;
  double ratio = 0.0;
  std::size_t same_pairs = 0;
  std::size_t cross_pairs = 0;
  /// True when no two distinct series share a label, so `same` averages the
  /// (zero) diagonal only.
  bool diagonal_only = false;
};

/// Throws DataError with a single class, misaligned labels, or when every
/// cross-label distance is zero.
ClassSeparation class_separation(const DistMatrix& d, std::span<const std::string> labels);

/// Candidate schemes for scheme_search: every combination of detrend count,
/// normalize flag, alphabet size and quantile shift, cut at the maxent
/// partition of the training data, plus any explicit schemes.
struct SchemeGrid {
  std::vector<std::size_t> detrend = {0};
  std::vector<bool> normalize = {false};
  std::vector<std::size_t> alphabet_sizes = {2};
  std::vector<double> quantile_shifts = {0.0};
  std::vector<QuantScheme> explicit_schemes;
};

struct RankedScheme {
  QuantScheme scheme;
  ClassSeparation score;
};

struct SearchResult {
  /// Ascending by ratio; ties keep grid order.
  std::vector<RankedScheme> ranking;
  /// One line per skipped scheme.
  std::vector<std::string> notes;
};

/// Quantizes the labeled data under each grid scheme, builds its distance
/// matrix over the base set with the matching alphabet, and ranks schemes by
/// class-separation ratio. Schemes that fail are skipped with a note; throws
/// DataError only when all fail.
SearchResult scheme_search(const LabeledDataset& data, const SchemeGrid& grid,
                           std::span<const BaseSet> bases,
                           CoordNorm norm = CoordNorm::kL1);

}  // namespace smash
