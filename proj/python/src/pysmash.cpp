// Python bindings for the smash core.

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <string>
#include <vector>

#include "smash/smash.hpp"

namespace py = pybind11;
using namespace smash;

namespace {

py::array_t<double> to_numpy(const DistMatrix& d) {
  py::array_t<double> out({d.size(), d.size()});
  std::copy(d.values().begin(), d.values().end(), out.mutable_data());
  return out;
}

DistMatrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
    throw InvalidArgument("distance matrix must be square");
  }
  DistMatrix d(static_cast<std::size_t>(a.shape(0)));
  const auto view = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    for (py::ssize_t j = 0; j < a.shape(1); ++j) d(i, j) = view(i, j);
  }
  return d;
}

py::dict report_dict(const InferReport& r) {
  py::dict out;
  out["sync_word"] = r.sync_word;
  out["seed_word"] = r.seed_word;
  out["candidate_count"] = r.candidate_count;
  out["candidate_spread"] = r.candidate_spread;
  out["coarse_merge"] = r.coarse_merge;
  out["discovered_states"] = r.discovered_states;
  out["low_support_edges"] = r.low_support_edges;
  out["capped_edges"] = r.capped_edges;
  out["closed_components"] = r.closed_components;
  out["warnings"] = r.warnings;
  out["text"] = format_report(r);
  return out;
}

py::dict separation_dict(const ClassSeparation& c) {
  py::dict out;
  out["same"] = c.same;
  out["cross"] = c.cross;
  out["ratio"] = c.ratio;
  out["same_pairs"] = c.same_pairs;
  out["cross_pairs"] = c.cross_pairs;
  out["diagonal_only"] = c.diagonal_only;
  return out;
}

}  // namespace

PYBIND11_MODULE(pysmash, m) {
  m.doc() = "PFSA modeling, inference and likelihood-coordinate distances";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidModel>(m, "InvalidModel", error.ptr());
  py::register_exception<AlphabetMismatch>(m, "AlphabetMismatch", error.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

  py::class_<Pfsa>(m, "Pfsa")
      .def(py::init([](std::size_t alphabet_size, const std::vector<std::vector<double>>& probs,
                       const std::vector<std::vector<std::optional<StateIndex>>>& next) {
             if (probs.size() != next.size()) {
               throw InvalidModel("probs and next describe different state counts");
             }
             std::vector<StateRecord> states;
             for (std::size_t q = 0; q < probs.size(); ++q) states.push_back({probs[q], next[q]});
             return Pfsa(alphabet_size, std::move(states));
           }),
           py::arg("alphabet_size"), py::arg("probs"), py::arg("next"),
           "probs[q][s] is the emission probability; next[q][s] the successor or None.")
      .def_property_readonly("alphabet_size", &Pfsa::alphabet_size)
      .def_property_readonly("num_states", &Pfsa::num_states)
      .def("prob", &Pfsa::prob, py::arg("state"), py::arg("symbol"))
      .def("next", &Pfsa::next, py::arg("state"), py::arg("symbol"))
      .def_property_readonly("probs", [](const Pfsa& p) {
        std::vector<std::vector<double>> rows;
        for (const auto& s : p.states()) rows.push_back(s.probs);
        return rows;
      })
      .def_property_readonly("transitions", [](const Pfsa& p) {
        std::vector<std::vector<std::optional<StateIndex>>> rows;
        for (const auto& s : p.states()) rows.push_back(s.next);
        return rows;
      })
      .def("validate", [](const Pfsa& p) {
        std::vector<std::string> out;
        for (const auto& v : validate(p)) out.push_back(v.message);
        return out;
      }, "Messages for every violated invariant; empty for a valid machine.")
      .def("to_json", &pfsa_to_json)
      .def_static("from_json", &pfsa_from_json, py::arg("text"))
      .def_static("load", &load_pfsa, py::arg("path"))
      .def("save", [](const Pfsa& p, const std::filesystem::path& path) { save_pfsa(p, path); },
           py::arg("path"))
      .def(py::self == py::self)
      .def("__repr__", [](const Pfsa& p) {
        return "<Pfsa " + std::to_string(p.num_states()) + " states over " +
               std::to_string(p.alphabet_size()) + " symbols>";
      });

  m.def("stationary_distribution", [](const Pfsa& p) { return stationary_distribution(p).probs; },
        py::arg("machine"));
  m.def("sample", &sample, py::arg("machine"), py::arg("length"), py::arg("seed"),
        py::arg("start") = std::nullopt);
  m.def("minimize", &minimize, py::arg("machine"), py::arg("tolerance") = kEquivalenceTolerance);

  m.def("entropy_rate", &entropy_rate, py::arg("machine"));
  m.def("kl_divergence", [](const Pfsa& g, const Pfsa& h) { return kl_divergence(g, h).bits; },
        py::arg("g"), py::arg("h"), "Divergence rate D(g || h) in bits per symbol.");
  m.def("seq_probability",
        [](const Pfsa& p, const SymbolSeq& x) { return seq_probability(p, x); },
        py::arg("machine"), py::arg("x"));
  m.def("log_likelihood",
        [](const SymbolSeq& x, const Pfsa& p) { return log_likelihood(x, p).bits_per_symbol; },
        py::arg("x"), py::arg("machine"), "-(1/|x|) log2 Pr(x) in bits per symbol.");

  m.def("infer",
        [](const SymbolSeq& x, std::size_t alphabet_size, double epsilon, std::size_t min_count,
           std::size_t max_states, double smoothing_alpha, double merge_tolerance) {
          InferParams params;
          params.epsilon = epsilon;
          params.min_count = min_count;
          params.max_states = max_states;
          params.smoothing_alpha = smoothing_alpha;
          params.merge_tolerance = merge_tolerance;
          auto result = infer(x, alphabet_size, params);
          return py::make_tuple(std::move(result.machine), report_dict(result.report));
        },
        py::arg("x"), py::arg("alphabet_size"), py::arg("epsilon") = InferParams{}.epsilon,
        py::arg("min_count") = InferParams{}.min_count,
        py::arg("max_states") = InferParams{}.max_states,
        py::arg("smoothing_alpha") = InferParams{}.smoothing_alpha,
        py::arg("merge_tolerance") = InferParams{}.merge_tolerance,
        "Returns (machine, report).");

  py::class_<QuantScheme>(m, "QuantScheme")
      .def(py::init([](std::size_t detrend, bool normalize, std::vector<double> cutoffs) {
             QuantScheme s{detrend, normalize, std::move(cutoffs)};
             check_scheme(s);
             return s;
           }),
           py::arg("detrend"), py::arg("normalize"), py::arg("cutoffs"))
      .def_readonly("detrend", &QuantScheme::detrend)
      .def_readonly("normalize", &QuantScheme::normalize)
      .def_readonly("cutoffs", &QuantScheme::cutoffs)
      .def_property_readonly("alphabet_size", &QuantScheme::alphabet_size)
      .def(py::self == py::self)
      .def("__str__", &format_scheme)
      .def("__repr__", [](const QuantScheme& s) { return "<QuantScheme " + format_scheme(s) + ">"; });
  m.def("parse_scheme", &parse_scheme, py::arg("text"));
  m.def("format_scheme", &format_scheme, py::arg("scheme"));
  m.def("apply_scheme",
        [](const std::vector<double>& x, const QuantScheme& s) { return apply_scheme(x, s); },
        py::arg("series"), py::arg("scheme"));

  py::class_<BaseSet>(m, "BaseSet")
      .def(py::init<std::vector<Pfsa>>(), py::arg("machines"))
      .def_property_readonly("machines", [](const BaseSet& b) {
        return std::vector<Pfsa>(b.machines().begin(), b.machines().end());
      })
      .def_property_readonly("alphabet_size", &BaseSet::alphabet_size)
      .def("__len__", &BaseSet::size);
  m.def("default_base_set", &default_base_set);

  m.def("featurize",
        [](const SymbolSeq& x, const BaseSet& b) { return featurize(x, b).coords; },
        py::arg("x"), py::arg("bases"));
  m.def("distance",
        [](const SymbolSeq& x, const SymbolSeq& y, const BaseSet& b, const std::string& norm) {
          return distance(x, y, b, parse_coord_norm(norm));
        },
        py::arg("x"), py::arg("y"), py::arg("bases"), py::arg("norm") = "l1");
  m.def("distance_matrix",
        [](const std::vector<SymbolSeq>& data, const BaseSet& b, const std::string& norm) {
          DistMatrix d;
          {
            py::gil_scoped_release release;
            d = distance_matrix(data, b, parse_coord_norm(norm));
          }
          return to_numpy(d);
        },
        py::arg("dataset"), py::arg("bases"), py::arg("norm") = "l1");
  m.def("class_separation",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& d,
           const std::vector<std::string>& labels) {
          return separation_dict(class_separation(from_numpy(d), labels));
        },
        py::arg("matrix"), py::arg("labels"));

  m.def("scheme_search",
        [](const std::vector<std::vector<double>>& series, const std::vector<std::string>& labels,
           std::vector<std::size_t> detrend, std::vector<bool> normalize,
           std::vector<std::size_t> alphabet_sizes, std::vector<double> quantile_shifts,
           std::vector<QuantScheme> explicit_schemes, std::optional<BaseSet> bases,
           const std::string& norm) {
          LabeledDataset data{series, labels};
          SchemeGrid grid{std::move(detrend), std::move(normalize), std::move(alphabet_sizes),
                          std::move(quantile_shifts), std::move(explicit_schemes)};
          std::vector<BaseSet> sets{default_base_set()};
          if (bases) sets.insert(sets.begin(), *bases);
          const auto result = scheme_search(data, grid, sets, parse_coord_norm(norm));
          py::list ranking;
          for (const auto& r : result.ranking) {
            ranking.append(py::make_tuple(r.scheme, separation_dict(r.score)));
          }
          return py::make_tuple(ranking, result.notes);
        },
        py::arg("series"), py::arg("labels"), py::arg("detrend") = SchemeGrid{}.detrend,
        py::arg("normalize") = SchemeGrid{}.normalize,
        py::arg("alphabet_sizes") = SchemeGrid{}.alphabet_sizes,
        py::arg("quantile_shifts") = SchemeGrid{}.quantile_shifts,
        py::arg("explicit_schemes") = std::vector<QuantScheme>{},
        py::arg("bases") = std::nullopt, py::arg("norm") = "l1",
        "Returns (ranking, notes); ranking holds (scheme, separation) best first.");
}
