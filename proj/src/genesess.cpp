#include "smash/genesess.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "chain.hpp"
#include "smash/error.hpp"
#include "smash/info.hpp"

namespace smash {

namespace {

// Start positions of `word` in x (only those where the whole word fits).
struct Occurrences {
  SymbolSeq word;
  std::vector<std::size_t> starts;
};

Occurrences empty_word(std::size_t n) {
  Occurrences occ;
  occ.starts.resize(n + 1);
  std::iota(occ.starts.begin(), occ.starts.end(), std::size_t{0});
  return occ;
}

Occurrences extend(std::span<const Symbol> x, const Occurrences& occ, Symbol s) {
  Occurrences out;
  out.word = occ.word;
  out.word.push_back(s);
  const std::size_t len = occ.word.size();
  for (std::size_t i : occ.starts) {
    if (i + len < x.size() && x[i + len] == s) out.starts.push_back(i);
  }
  return out;
}

Occurrences occurrences_of(std::span<const Symbol> x, std::span<const Symbol> word) {
  Occurrences occ = empty_word(x.size());
  for (Symbol s : word) occ = extend(x, occ, s);
  return occ;
}

EmpiricalDerivative derivative_of(std::span<const Symbol> x, const Occurrences& occ,
                                  std::size_t alphabet_size) {
  EmpiricalDerivative d;
  d.dist.assign(alphabet_size, 0.0);
  const std::size_t len = occ.word.size();
  for (std::size_t i : occ.starts) {
    if (i + len < x.size()) {
      d.dist[x[i + len]] += 1.0;
      ++d.support_count;
    }
  }
  if (d.support_count > 0) {
    for (double& v : d.dist) v /= static_cast<double>(d.support_count);
  }
  return d;
}

std::size_t max_word_length(std::size_t alphabet_size, double epsilon) {
  // The small slack keeps exact powers (epsilon = 1/4 on two symbols) exact.
  const double bound = std::log(1.0 / epsilon) /
                       std::log(static_cast<double>(alphabet_size));
  return static_cast<std::size_t>(std::floor(bound + 1e-9));
}

struct Closest {
  StateIndex state;
  double distance;
};

Closest closest_state(const std::vector<std::vector<double>>& state_dists,
                      std::span<const double> dist) {
  Closest best{0, std::numeric_limits<double>::infinity()};
  for (StateIndex q = 0; q < state_dists.size(); ++q) {
    const double d = detail::sup_distance(state_dists[q], dist);
    if (d < best.distance) best = {q, d};
  }
  return best;
}

}  // namespace

EmpiricalDerivative empirical_derivative(std::span<const Symbol> x,
                                         std::span<const Symbol> y,
                                         std::size_t alphabet_size) {
  check_symbols(x, alphabet_size);
  check_symbols(y, alphabet_size);
  return derivative_of(x, occurrences_of(x, y), alphabet_size);
}

void check_params(const InferParams& params) {
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw InvalidArgument("epsilon must lie in (0, 1)");
  }
  if (params.min_count < 1) throw InvalidArgument("min_count must be >= 1");
  if (params.max_states < 1) throw InvalidArgument("max_states must be >= 1");
  if (!(params.smoothing_alpha >= 0.0)) {
    throw InvalidArgument("smoothing_alpha must be >= 0");
  }
}

std::vector<DerivativeCandidate> sync_candidates(std::span<const Symbol> x,
                                                 std::size_t alphabet_size,
                                                 const InferParams& params) {
  check_params(params);
  check_symbols(x, alphabet_size);
  const std::size_t max_len = max_word_length(alphabet_size, params.epsilon);

  std::vector<DerivativeCandidate> out;
  std::vector<Occurrences> frontier;
  frontier.push_back(empty_word(x.size()));
  for (std::size_t len = 0; len <= max_len && !frontier.empty(); ++len) {
    std::vector<Occurrences> next_frontier;
    for (const auto& occ : frontier) {
      auto d = derivative_of(x, occ, alphabet_size);
      // Extensions of an unsupported word are never better supported.
      if (d.support_count < params.min_count) continue;
      out.push_back({occ.word, std::move(d)});
      if (len == max_len) continue;
      for (Symbol s = 0; s < alphabet_size; ++s) {
        next_frontier.push_back(extend(x, occ, s));
      }
    }
    frontier = std::move(next_frontier);
  }
  return out;
}

std::size_t select_hull_vertex(std::span<const DerivativeCandidate> candidates) {
  if (candidates.empty()) {
    throw DataError("no candidate derivative has enough support; input too short");
  }
  const std::size_t k = candidates.front().derivative.dist.size();
  std::set<std::vector<double>> distinct;
  for (const auto& c : candidates) distinct.insert(c.derivative.dist);
  std::vector<double> centroid(k, 0.0);
  for (const auto& point : distinct) {
    for (std::size_t i = 0; i < k; ++i) centroid[i] += point[i];
  }
  for (double& v : centroid) v /= static_cast<double>(distinct.size());

  auto distance = [&](const DerivativeCandidate& c) {
    double sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double diff = c.derivative.dist[i] - centroid[i];
      sq += diff * diff;
    }
    return std::sqrt(sq);
  };

  constexpr double kTie = 1e-12;
  std::size_t best = 0;
  double best_distance = distance(candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double d = distance(candidates[i]);
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    bool better = d > best_distance + kTie;
    if (!better && std::abs(d - best_distance) <= kTie) {
      if (a.word.size() != b.word.size()) {
        better = a.word.size() < b.word.size();
      } else if (a.derivative.support_count != b.derivative.support_count) {
        better = a.derivative.support_count > b.derivative.support_count;
      } else {
        better = a.word < b.word;
      }
    }
    if (better) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

SymbolSeq select_sync_sequence(std::span<const Symbol> x, std::size_t alphabet_size,
                               const InferParams& params) {
  const auto candidates = sync_candidates(x, alphabet_size, params);
  return candidates[select_hull_vertex(candidates)].word;
}

std::vector<StateIndex> scc_terminal(const Adjacency& graph,
                                     std::span<const double> visit_mass) {
  auto closed = closed_components(graph);
  if (closed.empty()) throw DataError("graph has no states");
  auto mass = [&](const std::vector<StateIndex>& component) {
    double total = 0.0;
    for (StateIndex v : component) {
      if (v < visit_mass.size()) total += visit_mass[v];
    }
    return total;
  };
  // Tarjan emits components in no index order; compare by smallest member on ties.
  std::sort(closed.begin(), closed.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  std::size_t best = 0;
  double best_mass = mass(closed[0]);
  for (std::size_t c = 1; c < closed.size(); ++c) {
    const double m = mass(closed[c]);
    if (m > best_mass) {
      best = c;
      best_mass = m;
    }
  }
  return closed[best];
}

InferResult infer(std::span<const Symbol> x, std::size_t alphabet_size,
                  const InferParams& params) {
  check_params(params);
  if (alphabet_size < 2) throw InvalidArgument("alphabet size must be >= 2");
  check_symbols(x, alphabet_size);
  const std::size_t k = alphabet_size;
  InferReport report;
  if (x.size() < kRecommendedMinLength) {
    report.warnings.push_back("input has only " + std::to_string(x.size()) +
                              " symbols; estimates will be noisy");
  }

  // Step one: synchronizing word.
  const auto candidates = sync_candidates(x, k, params);
  const std::size_t chosen = select_hull_vertex(candidates);
  report.sync_word = candidates[chosen].word;
  report.candidate_count = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      report.candidate_spread =
          std::max(report.candidate_spread,
                   detail::sup_distance(candidates[i].derivative.dist,
                                        candidates[j].derivative.dist));
    }
  }
  report.coarse_merge = params.epsilon >= report.candidate_spread;
  if (report.coarse_merge) {
    std::ostringstream msg;
    msg << "coarse merge: epsilon " << params.epsilon
        << " >= spread of candidate derivatives " << report.candidate_spread;
    report.warnings.push_back(msg.str());
  }

  // Candidates within epsilon of the sync word would be matched to the same
  // state anyway; seed with the shortest, best-supported of them.
  std::size_t seed = chosen;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& a = candidates[i];
    const auto& b = candidates[seed];
    if (detail::sup_distance(a.derivative.dist, candidates[chosen].derivative.dist) >
        params.epsilon) {
      continue;
    }
    if (a.word.size() != b.word.size()) {
      if (a.word.size() < b.word.size()) seed = i;
    } else if (a.derivative.support_count > b.derivative.support_count) {
      seed = i;
    }
  }
  report.seed_word = candidates[seed].word;

  // Step two: transition structure.
  std::vector<Occurrences> ids;
  std::vector<std::vector<double>> dists;
  std::vector<std::vector<StateIndex>> delta;
  ids.push_back(occurrences_of(x, report.seed_word));
  dists.push_back(candidates[seed].derivative.dist);
  for (StateIndex q = 0; q < ids.size(); ++q) {
    delta.emplace_back(k);
    for (Symbol s = 0; s < k; ++s) {
      Occurrences ext = extend(x, ids[q], s);
      auto d = derivative_of(x, ext, k);
      if (d.support_count >= params.min_count) {
        const Closest c = closest_state(dists, d.dist);
        if (c.distance <= params.epsilon) {
          delta[q][s] = c.state;
        } else if (ids.size() < params.max_states) {
          delta[q][s] = ids.size();
          ids.push_back(std::move(ext));
          dists.push_back(std::move(d.dist));
        } else {
          delta[q][s] = c.state;
          ++report.capped_edges;
        }
        continue;
      }
      // Too little data behind the extended word: use its longest
      // well-supported suffix as a stand-in derivative.
      ++report.low_support_edges;
      const SymbolSeq& word = ext.word;
      EmpiricalDerivative fallback;
      for (std::size_t drop = 1; drop <= word.size(); ++drop) {
        fallback = derivative_of(
            x, occurrences_of(x, std::span(word).subspan(drop)), k);
        if (fallback.support_count >= params.min_count) break;
      }
      delta[q][s] = closest_state(dists, fallback.dist).state;
    }
  }
  report.discovered_states = ids.size();
  if (report.capped_edges > 0) {
    report.warnings.push_back("max_states reached; " +
                              std::to_string(report.capped_edges) +
                              " edges routed to the closest state");
  }

  // Step three: observation probabilities from the sync state.
  const std::size_t n = ids.size();
  std::vector<std::vector<double>> counts(n, std::vector<double>(k, 0.0));
  std::vector<double> visits(n, 0.0);
  StateIndex q = 0;
  for (Symbol s : x) {
    counts[q][s] += 1.0;
    visits[q] += 1.0;
    q = delta[q][s];
  }

  auto estimate_row = [&](const std::vector<double>& c) {
    std::vector<double> row(k);
    double total = 0.0;
    for (Symbol s = 0; s < k; ++s) {
      row[s] = c[s] + params.smoothing_alpha;
      total += row[s];
    }
    if (total <= 0.0) return std::vector<double>(k, 1.0 / static_cast<double>(k));
    for (double& v : row) v /= total;
    return row;
  };

  std::vector<std::vector<double>> rows(n);
  Adjacency graph(n);
  for (StateIndex p = 0; p < n; ++p) {
    rows[p] = estimate_row(counts[p]);
    for (Symbol s = 0; s < k; ++s) {
      if (rows[p][s] > 0.0) graph[p].push_back(delta[p][s]);
    }
  }
  report.closed_components = closed_components(graph).size();
  const auto kept = scc_terminal(graph, visits);
  if (report.closed_components > 1) {
    report.warnings.push_back(std::to_string(report.closed_components) +
                              " closed components; kept the most visited");
  }

  std::vector<StateIndex> new_index(n, n);
  for (std::size_t i = 0; i < kept.size(); ++i) new_index[kept[i]] = i;
  std::vector<StateRecord> states;
  std::vector<std::vector<double>> kept_counts;
  for (StateIndex p : kept) {
    StateRecord r;
    r.probs = rows[p];
    r.next.resize(k);
    for (Symbol s = 0; s < k; ++s) {
      if (rows[p][s] > 0.0) r.next[s] = new_index[delta[p][s]];
    }
    states.push_back(std::move(r));
    kept_counts.push_back(counts[p]);
  }
  Pfsa machine(k, std::move(states));

  const double merge_tol =
      params.merge_tolerance < 0.0 ? params.epsilon : params.merge_tolerance;
  if (merge_tol > 0.0 && machine.num_states() > 1) {
    auto merged = minimize_with_blocks(machine, merge_tol);
    if (merged.machine.num_states() < machine.num_states()) {
      const std::size_t m = merged.machine.num_states();
      std::vector<std::vector<double>> block_counts(m, std::vector<double>(k, 0.0));
      for (StateIndex p = 0; p < machine.num_states(); ++p) {
        for (Symbol s = 0; s < k; ++s) {
          block_counts[merged.block_of[p]][s] += kept_counts[p][s];
        }
      }
      std::vector<StateRecord> merged_states = merged.machine.states();
      for (StateIndex b = 0; b < m; ++b) {
        merged_states[b].probs = estimate_row(block_counts[b]);
      }
      report.merged_states = machine.num_states() - m;
      machine = Pfsa(k, std::move(merged_states));
      kept_counts = std::move(block_counts);
    }
  }

  report.state_count = machine.num_states();
  for (const auto& c : kept_counts) {
    report.visit_counts.push_back(
        static_cast<std::size_t>(std::accumulate(c.begin(), c.end(), 0.0)));
  }
  require_valid(machine);
  return {std::move(machine), std::move(report)};
}

std::string format_report(const InferReport& r) {
  std::ostringstream out;
  out << "states: " << r.state_count << "\n";
  out << "sync word: ";
  if (r.sync_word.empty()) out << "(empty)";
  for (Symbol s : r.sync_word) out << s;
  out << "\n";
  out << "seed word: ";
  if (r.seed_word.empty()) out << "(empty)";
  for (Symbol s : r.seed_word) out << s;
  out << "\n";
  out << "candidates: " << r.candidate_count << " (spread " << r.candidate_spread
      << ")\n";
  out << "discovered states: " << r.discovered_states << "\n";
  out << "closed components: " << r.closed_components << "\n";
  out << "merged states: " << r.merged_states << "\n";
  out << "low-support edges: " << r.low_support_edges << "\n";
  out << "capped edges: " << r.capped_edges << "\n";
  out << "coarse merge: " << (r.coarse_merge ? "yes" : "no") << "\n";
  out << "visits:";
  for (auto v : r.visit_counts) out << " " << v;
  out << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace smash
