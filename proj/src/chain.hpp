#pragma once

// Internal helpers shared by the stationary solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "smash/error.hpp"

namespace smash::detail {

inline double sup_distance(std::span<const double> a,
                           std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

/// Power iteration on the lazy chain (I + P) / 2, whose limit from `p`
/// equals the Cesaro limit of P from `p` and is reached geometrically even
/// when P is periodic. `step(in, out)` must write in * P into out.
/// Stops once ||p P - p||_inf <= tolerance.
template <typename Step>
std::vector<double> lazy_power_iteration(std::vector<double> p, Step&& step,
                                         double tolerance,
                                         std::size_t max_iterations,
                                         const char* what) {
  std::vector<double> moved(p.size());
  for (std::size_t it = 0; it < max_iterations; ++it) {
    step(std::span<const double>(p), std::span<double>(moved));
    if (sup_distance(p, moved) <= tolerance) {
      return p;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = 0.5 * (p[i] + moved[i]);
      total += p[i];
    }
    for (double& v : p) v /= total;
  }
  throw ConvergenceError(std::string(what) + ": no convergence after " +
                         std::to_string(max_iterations) + " iterations");
}

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Index drawn from a probability vector; zero-probability entries are never
/// returned.
inline std::size_t draw_index(std::span<const double> probs,
                              std::mt19937_64& rng) {
  const double u = unit_uniform(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

}  // namespace smash::detail
