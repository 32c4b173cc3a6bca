#include "smash/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chain.hpp"
#include "smash/error.hpp"

namespace smash {

double entropy_bits(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double kl_bits(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double entropy_rate(const Pfsa& m) {
  const auto p = stationary_distribution(m);
  double h = 0.0;
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    h += p.probs[q] * entropy_bits(m.row(q));
  }
  return h;
}

namespace {

void require_same_alphabet(const Pfsa& g, const Pfsa& h) {
  if (g.alphabet_size() != h.alphabet_size()) {
    throw AlphabetMismatch("machines have alphabet sizes " +
                           std::to_string(g.alphabet_size()) + " and " +
                           std::to_string(h.alphabet_size()));
  }
}

}  // namespace

Eigen::MatrixXd joint_stationary(const Pfsa& g, const Pfsa& h) {
  require_same_alphabet(g, h);
  const auto pg = stationary_distribution(g);
  const auto ph = stationary_distribution(h);
  const std::size_t ng = g.num_states();
  const std::size_t nh = h.num_states();
  const std::size_t k = g.alphabet_size();

  std::vector<double> start(ng * nh);
  for (StateIndex a = 0; a < ng; ++a) {
    for (StateIndex b = 0; b < nh; ++b) {
      start[a * nh + b] = pg.probs[a] / static_cast<double>(nh);
    }
  }

  auto step = [&](std::span<const double> in, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (StateIndex a = 0; a < ng; ++a) {
      for (StateIndex b = 0; b < nh; ++b) {
        const double mass = in[a * nh + b];
        if (mass == 0.0) continue;
        for (Symbol s = 0; s < k; ++s) {
          const double emit = g.prob(a, s);
          if (emit <= 0.0) continue;
          const StateIndex a2 = g.next_unchecked(a, s);
          if (h.has_next(b, s)) {
            out[a2 * nh + h.next_unchecked(b, s)] += mass * emit;
          } else {
            for (StateIndex b2 = 0; b2 < nh; ++b2) {
              out[a2 * nh + b2] += mass * emit * ph.probs[b2];
            }
          }
        }
      }
    }
  };

  const auto p = detail::lazy_power_iteration(std::move(start), step,
                                              kJointResidual, 2'000'000,
                                              "joint stationary distribution");
  Eigen::MatrixXd joint(static_cast<Eigen::Index>(ng),
                        static_cast<Eigen::Index>(nh));
  for (StateIndex a = 0; a < ng; ++a) {
    for (StateIndex b = 0; b < nh; ++b) {
      joint(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          p[a * nh + b];
    }
  }
  return joint;
}

Divergence kl_divergence(const Pfsa& g, const Pfsa& h) {
  const Eigen::MatrixXd joint = joint_stationary(g, h);
  const std::size_t k = g.alphabet_size();
  Divergence out;
  std::vector<double> smoothed(k);
  for (StateIndex a = 0; a < g.num_states(); ++a) {
    for (StateIndex b = 0; b < h.num_states(); ++b) {
      const double w =
          joint(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (w <= 0.0) continue;
      double d = kl_bits(g.row(a), h.row(b));
      if (std::isinf(d)) {
        double total = 0.0;
        for (Symbol s = 0; s < k; ++s) {
          smoothed[s] = std::max(h.prob(b, s), kClampFloor);
          total += smoothed[s];
        }
        for (double& v : smoothed) v /= total;
        d = kl_bits(g.row(a), smoothed);
        // Pairs that only carry solver round-off are not reachable.
        if (w > kJointResidual) ++out.smoothed_pairs;
      }
      out.bits += w * d;
    }
  }
  out.bits = std::max(out.bits, 0.0);
  return out;
}

void check_symbols(std::span<const Symbol> x, std::size_t alphabet_size) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= alphabet_size) {
      throw AlphabetMismatch("symbol " + std::to_string(x[i]) + " at position " +
                             std::to_string(i) + " is outside alphabet of size " +
                             std::to_string(alphabet_size));
    }
  }
}

double seq_probability(const Pfsa& m, std::span<const Symbol> x) {
  check_symbols(x, m.alphabet_size());
  std::vector<double> alpha = stationary_distribution(m).probs;
  std::vector<double> next(alpha.size());
  for (Symbol s : x) {
    std::fill(next.begin(), next.end(), 0.0);
    for (StateIndex q = 0; q < m.num_states(); ++q) {
      if (alpha[q] == 0.0 || !m.has_next(q, s)) continue;
      next[m.next_unchecked(q, s)] += alpha[q] * m.prob(q, s);
    }
    alpha.swap(next);
  }
  double total = 0.0;
  for (double v : alpha) total += v;
  return total;
}

ForwardFilter::ForwardFilter(const Pfsa& m)
    : ForwardFilter(m, stationary_distribution(m)) {}

ForwardFilter::ForwardFilter(const Pfsa& m, StateDist stationary)
    : machine_(m),
      stationary_(std::move(stationary.probs)),
      belief_(stationary_),
      scratch_(stationary_.size()) {}

void ForwardFilter::reset() {
  belief_ = stationary_;
  clamps_ = 0;
}

double ForwardFilter::step(Symbol s) {
  const Pfsa& m = machine_;
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  double total = 0.0;
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    const double mass = belief_[q] * m.prob(q, s);
    if (mass <= 0.0) continue;
    scratch_[m.next_unchecked(q, s)] += mass;
    total += mass;
  }
  if (total < kClampFloor) {
    ++clamps_;
    belief_ = stationary_;
    return kClampFloor;
  }
  for (double& v : scratch_) v /= total;
  belief_.swap(scratch_);
  return total;
}

FilterStep filter_update(const Pfsa& m, const StateDist& p, Symbol s) {
  if (s >= m.alphabet_size()) {
    throw AlphabetMismatch("symbol " + std::to_string(s) +
                           " is outside alphabet of size " +
                           std::to_string(m.alphabet_size()));
  }
  if (p.probs.size() != m.num_states()) {
    throw InvalidModel("state distribution has " + std::to_string(p.probs.size()) +
                       " entries, machine has " + std::to_string(m.num_states()) +
                       " states");
  }
  FilterStep out;
  std::vector<double> moved(m.num_states(), 0.0);
  double total = 0.0;
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    const double mass = p.probs[q] * m.prob(q, s);
    if (mass <= 0.0) continue;
    moved[m.next_unchecked(q, s)] += mass;
    total += mass;
  }
  if (total < kClampFloor) {
    out.next = stationary_distribution(m);
    out.step_prob = kClampFloor;
    out.clamped = true;
    return out;
  }
  for (double& v : moved) v /= total;
  out.next.probs = std::move(moved);
  out.step_prob = total;
  return out;
}

LogLikelihood log_likelihood(std::span<const Symbol> x, const Pfsa& m) {
  if (x.empty()) throw DataError("log-likelihood of an empty sequence");
  check_symbols(x, m.alphabet_size());
  ForwardFilter filter(m);
  double total_bits = 0.0;
  for (Symbol s : x) total_bits -= std::log2(filter.step(s));
  return {total_bits / static_cast<double>(x.size()), filter.clamp_count()};
}

}  // namespace smash
