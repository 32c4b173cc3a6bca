#include "smash/metric.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "smash/error.hpp"
#include "smash/info.hpp"

namespace smash {

CoordNorm parse_coord_norm(std::string_view text) {
  if (text == "l1") return CoordNorm::kL1;
  if (text == "l2") return CoordNorm::kL2;
  if (text == "linf") return CoordNorm::kLinf;
  throw InvalidArgument("unknown coordinate norm '" + std::string(text) +
                        "' (expected l1, l2 or linf)");
}

std::string_view to_string(CoordNorm norm) {
  switch (norm) {
    case CoordNorm::kL1: return "l1";
    case CoordNorm::kL2: return "l2";
    case CoordNorm::kLinf: return "linf";
  }
  return "l1";
}

BaseSet::BaseSet(std::vector<Pfsa> machines) : machines_(std::move(machines)) {
  if (machines_.empty()) throw InvalidModel("base set is empty");
  const std::size_t k = machines_.front().alphabet_size();
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    const Pfsa& m = machines_[i];
    if (m.alphabet_size() != k) {
      throw AlphabetMismatch("base machine " + std::to_string(i) + " has alphabet size " +
                             std::to_string(m.alphabet_size()) + ", expected " +
                             std::to_string(k));
    }
    require_valid(m);
    for (StateIndex q = 0; q < m.num_states(); ++q) {
      for (double p : m.row(q)) {
        if (!(p > 0.0)) {
          throw InvalidModel("base machine " + std::to_string(i) +
                             " lacks full support at state " + std::to_string(q));
        }
      }
    }
    stationary_.push_back(stationary_distribution(m));
  }
}

namespace {

Pfsa binary_machine(std::vector<std::pair<double, double>> rows,
                    std::vector<std::pair<StateIndex, StateIndex>> next) {
  std::vector<StateRecord> states;
  for (std::size_t q = 0; q < rows.size(); ++q) {
    states.push_back({{rows[q].first, rows[q].second}, {next[q].first, next[q].second}});
  }
  return Pfsa(2, std::move(states));
}

}  // namespace

BaseSet default_base_set() {
  std::vector<Pfsa> machines;
  // Each entry: rows per state, then (next on 0, next on 1) per state.
  machines.push_back(binary_machine({{.3, .7}, {.7, .3}}, {{0, 1}, {0, 1}}));
  machines.push_back(binary_machine({{.3, .7}, {.7, .3}}, {{0, 1}, {1, 0}}));
  machines.push_back(
      binary_machine({{.3, .7}, {.7, .3}, {.6, .4}}, {{1, 2}, {2, 0}, {0, 1}}));
  machines.push_back(binary_machine({{.3, .7}, {.7, .3}, {.8, .2}, {.2, .8}},
                                    {{0, 1}, {2, 3}, {0, 1}, {2, 3}}));
  return BaseSet(std::move(machines));
}

FeatureVec featurize(std::span<const Symbol> x, const BaseSet& bases) {
  if (x.empty()) throw DataError("cannot featurize an empty sequence");
  check_symbols(x, bases.alphabet_size());
  FeatureVec out;
  out.coords.reserve(bases.size());
  const double inv_len = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    ForwardFilter filter(bases.machines()[i], bases.stationary()[i]);
    double bits = 0.0;
    for (Symbol s : x) bits -= std::log2(filter.step(s));
    out.coords.push_back(bits * inv_len);
  }
  return out;
}

double coord_distance(const FeatureVec& a, const FeatureVec& b, CoordNorm norm) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    const double diff = std::abs(a.coords[i] - b.coords[i]);
    switch (norm) {
      case CoordNorm::kL1: acc += diff; break;
      case CoordNorm::kL2: acc += diff * diff; break;
      case CoordNorm::kLinf: acc = std::max(acc, diff); break;
    }
  }
  return norm == CoordNorm::kL2 ? std::sqrt(acc) : acc;
}

double distance(std::span<const Symbol> x, std::span<const Symbol> y,
                const BaseSet& bases, CoordNorm norm) {
  return coord_distance(featurize(x, bases), featurize(y, bases), norm);
}

DistMatrix distance_matrix(std::span<const FeatureVec> features, CoordNorm norm) {
  const std::size_t n = features.size();
  DistMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = coord_distance(features[i], features[j], norm);
      out(i, j) = d;
      out(j, i) = d;
    }
  }
  return out;
}

DistMatrix distance_matrix(std::span<const SymbolSeq> dataset, const BaseSet& bases,
                           CoordNorm norm) {
  std::vector<FeatureVec> features(dataset.size());
  // Each worker owns a strided slice of `features`; the result does not
  // depend on the schedule.
  const std::size_t workers = std::clamp<std::size_t>(
      std::thread::hardware_concurrency(), 1, std::max<std::size_t>(dataset.size(), 1));
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < dataset.size(); i += workers) {
            features[i] = featurize(dataset[i], bases);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return distance_matrix(features, norm);
}

}  // namespace smash
