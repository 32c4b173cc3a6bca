#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "smash/pfsa.hpp"

namespace smash {

/// Norm applied to the difference of two coordinate vectors.
enum class CoordNorm { kL1, kL2, kLinf };

CoordNorm parse_coord_norm(std::string_view text);
std::string_view to_string(CoordNorm norm);

/// Reference machines defining the coordinate system. All machines share one
/// alphabet and have strictly positive observation rows, so log-likelihoods
/// are always finite.
class BaseSet {
 public:
  /// Throws InvalidModel / AlphabetMismatch when the invariants fail.
  explicit BaseSet(std::vector<Pfsa> machines);

  std::span<const Pfsa> machines() const { return machines_; }
  std::size_t size() const { return machines_.size(); }
  std::size_t alphabet_size() const { return machines_.front().alphabet_size(); }
  std::span<const StateDist> stationary() const { return stationary_; }

 private:
  std::vector<Pfsa> machines_;
  std::vector<StateDist> stationary_;
};

/// The four binary machines (2, 2, 3 and 4 states) used as the default
/// coordinate system.
BaseSet default_base_set();

/// Per-symbol log-likelihoods (bits) of one sequence under each base machine.
struct FeatureVec {
  std::vector<double> coords;
};

/// Throws DataError on empty x and AlphabetMismatch on foreign symbols.
FeatureVec featurize(std::span<const Symbol> x, const BaseSet& bases);

double coord_distance(const FeatureVec& a, const FeatureVec& b,
                      CoordNorm norm = CoordNorm::kL1);

double distance(std::span<const Symbol> x, std::span<const Symbol> y,
                const BaseSet& bases, CoordNorm norm = CoordNorm::kL1);

/// Dense symmetric matrix with a zero diagonal.
class DistMatrix {
 public:
  DistMatrix() = default;
  explicit DistMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Pairwise distances from features computed once per sequence.
DistMatrix distance_matrix(std::span<const FeatureVec> features,
                           CoordNorm norm = CoordNorm::kL1);

DistMatrix distance_matrix(std::span<const SymbolSeq> dataset, const BaseSet& bases,
                           CoordNorm norm = CoordNorm::kL1);

}  // namespace smash
