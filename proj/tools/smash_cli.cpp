// smash: command-line front end for the library.
//
// Exit status: 0 success, 2 usage or malformed input, 3 data that cannot
// support the request.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smash/smash.hpp"

namespace {

using namespace smash;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

/// Writes to `path`, or to stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw ParseError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::size_t alphabet_of(const std::vector<SymbolSeq>& seqs) {
  Symbol top = 1;
  for (const auto& s : seqs) {
    for (Symbol v : s) top = std::max(top, v);
  }
  return static_cast<std::size_t>(top) + 1;
}

BaseSet load_bases(const std::vector<std::string>& files) {
  if (files.empty()) return default_base_set();
  std::vector<Pfsa> machines;
  for (const auto& f : files) machines.push_back(load_pfsa(f));
  return BaseSet(std::move(machines));
}

void print_separation(std::ostream& out, const ClassSeparation& c) {
  out << "s " << fixed6(c.same) << "\n";
  out << "d " << fixed6(c.cross) << "\n";
  out << "r " << fixed6(c.ratio) << "\n";
  if (c.diagonal_only) {
    out << "note: every label is unique; s averages the diagonal only\n";
  }
}

// Splits "0,1" style flag values.
template <class T>
std::vector<T> split_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream cell(item);
    T v{};
    if (!(cell >> v) || !(cell >> std::ws).eof()) {
      throw InvalidArgument("bad list item '" + item + "' in '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty list '" + text + "'");
  return out;
}

struct GenArgs {
  std::string model;
  std::size_t length = 1000;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string start = "stationary";
  std::string out;
};

int run_gen(const GenArgs& a) {
  const Pfsa m = load_pfsa(a.model);
  std::optional<StateIndex> start;
  if (a.start != "stationary") {
    try {
      start = std::stoul(a.start);
    } catch (const std::exception&) {
      throw InvalidArgument("--start takes 'stationary' or a state index, got '" + a.start + "'");
    }
  }
  std::vector<SymbolSeq> seqs;
  for (std::size_t i = 0; i < a.count; ++i) seqs.push_back(sample(m, a.length, a.seed + i, start));
  Output out(a.out);
  write_symbol_lines(out.stream(), seqs);
  return 0;
}

struct LoglikArgs {
  std::string model;
  std::string seqs;
};

int run_loglik(const LoglikArgs& a) {
  const Pfsa m = load_pfsa(a.model);
  for (const auto& x : read_symbol_file(a.seqs)) {
    const auto ll = log_likelihood(x, m);
    std::cout << fixed6(ll.bits_per_symbol);
    if (ll.clamp_count > 0) std::cout << " clamped " << ll.clamp_count;
    std::cout << "\n";
  }
  return 0;
}

struct InferArgs {
  std::string seqs;
  std::size_t line = 0;
  std::size_t alphabet = 0;
  InferParams params;
  std::string out;
};

int run_infer(const InferArgs& a) {
  const auto seqs = read_symbol_file(a.seqs);
  if (a.line >= seqs.size()) {
    throw DataError("'" + a.seqs + "' has " + std::to_string(seqs.size()) +
                    " sequences; --line " + std::to_string(a.line) + " is out of range");
  }
  const std::size_t k = a.alphabet ? a.alphabet : alphabet_of(seqs);
  const auto result = infer(seqs[a.line], k, a.params);
  // Model to the file (or stdout); the report always goes to stderr when the
  // model takes stdout.
  Output out(a.out);
  out.stream() << pfsa_to_json(result.machine) << "\n";
  (a.out.empty() || a.out == "-" ? std::cerr : std::cout) << format_report(result.report);
  return 0;
}

struct QuantizeArgs {
  std::string csv;
  std::string scheme;
  bool search = false;
  std::string labels;
  std::string detrend = "0";
  std::string normalize = "0";
  std::string alphabets = "2";
  std::string shifts = "0";
  std::vector<std::string> bases;
  std::string coord_norm = "l1";
  std::string out;
};

// Quantizes every row, skipping degenerate ones with a warning.
std::vector<SymbolSeq> quantize_rows(const std::vector<std::vector<double>>& rows,
                                     const QuantScheme& scheme) {
  std::vector<SymbolSeq> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.push_back(apply_scheme(rows[i], scheme));
    } catch (const DataError& e) {
      std::cerr << "warning: row " << i << " skipped: " << e.what() << "\n";
    }
  }
  if (out.empty() && !rows.empty()) throw DataError("every row was skipped");
  return out;
}

int run_quantize(const QuantizeArgs& a) {
  const auto rows = read_csv_file(a.csv);
  if (rows.empty()) throw DataError("'" + a.csv + "' holds no series");
  if (!a.search) {
    const QuantScheme scheme = parse_scheme(a.scheme);
    const auto symbols = quantize_rows(rows, scheme);
    Output out(a.out);
    write_symbol_lines(out.stream(), symbols);
    return 0;
  }

  LabeledDataset data{rows, read_labels_file(a.labels)};
  SchemeGrid grid;
  grid.detrend = split_list<std::size_t>(a.detrend);
  grid.normalize.clear();
  for (int v : split_list<int>(a.normalize)) {
    if (v != 0 && v != 1) throw InvalidArgument("--normalize takes 0 and/or 1");
    grid.normalize.push_back(v == 1);
  }
  grid.alphabet_sizes = split_list<std::size_t>(a.alphabets);
  grid.quantile_shifts = split_list<double>(a.shifts);
  if (!a.scheme.empty()) grid.explicit_schemes.push_back(parse_scheme(a.scheme));

  std::vector<BaseSet> bases{default_base_set()};
  if (!a.bases.empty()) bases.insert(bases.begin(), load_bases(a.bases));
  const auto result = scheme_search(data, grid, bases, parse_coord_norm(a.coord_norm));
  for (const auto& note : result.notes) std::cerr << "skipped: " << note << "\n";
  std::cout << "scheme\tr\ts\td\n";
  for (const auto& r : result.ranking) {
    std::cout << format_scheme(r.scheme) << "\t" << fixed6(r.score.ratio) << "\t"
              << fixed6(r.score.same) << "\t" << fixed6(r.score.cross) << "\n";
  }
  if (!a.out.empty()) {
    Output out(a.out);
    write_symbol_lines(out.stream(), quantize_rows(rows, result.ranking.front().scheme));
  }
  return 0;
}

struct DistArgs {
  std::vector<std::string> seqs;
  std::string csv;
  std::string scheme;
  std::vector<std::string> bases;
  std::string labels;
  std::string out;
  std::string heatmap;
  std::string coord_norm = "l1";
};

int run_dist(const DistArgs& a) {
  std::vector<SymbolSeq> data;
  if (!a.seqs.empty()) {
    for (const auto& file : a.seqs) {
      auto part = read_symbol_file(file);
      data.insert(data.end(), part.begin(), part.end());
    }
  } else {
    if (a.scheme.empty()) throw InvalidArgument("--csv needs --scheme");
    const auto rows = read_csv_file(a.csv);
    const QuantScheme scheme = parse_scheme(a.scheme);
    // Rows are kept aligned with labels, so a degenerate row is an error here.
    for (const auto& row : rows) data.push_back(apply_scheme(row, scheme));
  }
  if (data.empty()) throw DataError("empty dataset");
  const BaseSet bases = load_bases(a.bases);
  const DistMatrix d = distance_matrix(data, bases, parse_coord_norm(a.coord_norm));

  if (!a.out.empty()) {
    Output out(a.out);
    write_matrix_csv(out.stream(), d);
  }
  if (!a.heatmap.empty()) {
    Output pgm(a.heatmap);
    write_pgm(pgm.stream(), d);
  }
  if (!a.labels.empty()) {
    print_separation(std::cout, class_separation(d, read_labels_file(a.labels)));
  } else if (a.out.empty()) {
    write_matrix_csv(std::cout, d);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PFSA modeling, inference and likelihood-coordinate distances"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Sample symbol sequences from a model");
  gen_cmd->add_option("model", gen.model, "Model JSON")->required();
  gen_cmd->add_option("-n,--length", gen.length, "Symbols per sequence");
  gen_cmd->add_option("-c,--count", gen.count, "Number of sequences");
  gen_cmd->add_option("-s,--seed", gen.seed, "Seed of the first sequence; later ones add 1");
  gen_cmd->add_option("--start", gen.start, "'stationary' or a state index");
  gen_cmd->add_option("-o,--output", gen.out, "Output file (default stdout)");

  std::string entropy_model;
  auto* entropy_cmd = app.add_subcommand("entropy", "Entropy rate in bits per symbol");
  entropy_cmd->add_option("model", entropy_model, "Model JSON")->required();

  std::string kl_a, kl_b;
  auto* kl_cmd = app.add_subcommand("kldiv", "KL divergence rate D(a || b) in bits per symbol");
  kl_cmd->add_option("a", kl_a, "Model JSON")->required();
  kl_cmd->add_option("b", kl_b, "Model JSON")->required();

  LoglikArgs loglik;
  auto* loglik_cmd = app.add_subcommand("loglik", "Per-symbol log-likelihood of each sequence");
  loglik_cmd->add_option("model", loglik.model, "Model JSON")->required();
  loglik_cmd->add_option("seqs", loglik.seqs, "Symbol file")->required();

  InferArgs inf;
  auto* infer_cmd = app.add_subcommand("infer", "Infer a model from one symbol sequence");
  infer_cmd->add_option("seqs", inf.seqs, "Symbol file")->required();
  infer_cmd->add_option("--line", inf.line, "Which sequence of the file to use");
  infer_cmd->add_option("-k,--alphabet", inf.alphabet,
                        "Alphabet size (default: largest symbol + 1, at least 2)");
  infer_cmd->add_option("-e,--epsilon", inf.params.epsilon, "Derivative matching radius");
  infer_cmd->add_option("--min-count", inf.params.min_count, "Support needed to trust a derivative");
  infer_cmd->add_option("--max-states", inf.params.max_states, "State cap");
  infer_cmd->add_option("--alpha", inf.params.smoothing_alpha, "Pseudo-count per cell");
  infer_cmd->add_option("--merge-tol", inf.params.merge_tolerance,
                        "Final merge tolerance (negative: epsilon, 0: off)");
  infer_cmd->add_option("-o,--output", inf.out, "Model file (default stdout)");

  QuantizeArgs quant;
  auto* quant_cmd = app.add_subcommand("quantize", "Turn CSV series into symbol sequences");
  quant_cmd->add_option("csv", quant.csv, "One series per row")->required();
  quant_cmd->add_option("--scheme", quant.scheme, "Scheme such as D1N1[3.]");
  auto* search_flag = quant_cmd->add_flag("--search", quant.search, "Rank a grid of schemes");
  quant_cmd->add_option("--labels", quant.labels, "One label per row (needed by --search)");
  quant_cmd->add_option("--detrend", quant.detrend, "Grid: detrend counts, e.g. 0,1");
  quant_cmd->add_option("--normalize", quant.normalize, "Grid: 0, 1 or 0,1");
  quant_cmd->add_option("--alphabet", quant.alphabets, "Grid: alphabet sizes, e.g. 2,3");
  quant_cmd->add_option("--shift", quant.shifts, "Grid: quantile shifts, e.g. -0.05,0,0.05");
  quant_cmd->add_option("--bases", quant.bases, "Base model files (one base set)");
  quant_cmd->add_option("--coord-norm", quant.coord_norm, "l1, l2 or linf");
  quant_cmd->add_option("-o,--output", quant.out, "Symbol file");
  search_flag->needs(quant_cmd->get_option("--labels"));

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Distance matrix over sequences");
  auto* seqs_opt = dist_cmd->add_option("--seqs", dist.seqs, "Symbol files, concatenated in order");
  auto* csv_opt = dist_cmd->add_option("--csv", dist.csv, "CSV series (needs --scheme)");
  seqs_opt->excludes(csv_opt);
  dist_cmd->add_option("--scheme", dist.scheme, "Quantization scheme for --csv");
  dist_cmd->add_option("--bases", dist.bases, "Base model files (default: built-in four)");
  dist_cmd->add_option("--labels", dist.labels, "Labels; prints s, d and r");
  dist_cmd->add_option("-o,--output", dist.out, "Matrix CSV");
  dist_cmd->add_option("--heatmap", dist.heatmap, "PGM heatmap");
  dist_cmd->add_option("--coord-norm", dist.coord_norm, "l1, l2 or linf");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*entropy_cmd) {
      std::cout << fixed6(entropy_rate(load_pfsa(entropy_model))) << "\n";
      return 0;
    }
    if (*kl_cmd) {
      const auto d = kl_divergence(load_pfsa(kl_a), load_pfsa(kl_b));
      std::cout << fixed6(d.bits) << "\n";
      if (d.smoothed_pairs > 0) {
        std::cerr << "warning: " << d.smoothed_pairs
                  << " state pairs needed smoothing of forbidden symbols\n";
      }
      return 0;
    }
    if (*loglik_cmd) return run_loglik(loglik);
    if (*infer_cmd) return run_infer(inf);
    if (*quant_cmd) {
      if (!quant.search && quant.scheme.empty()) {
        throw InvalidArgument("quantize needs --scheme or --search");
      }
      return run_quantize(quant);
    }
    if (*dist_cmd) {
      if (dist.seqs.empty() && dist.csv.empty()) throw InvalidArgument("dist needs --seqs or --csv");
      return run_dist(dist);
    }
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const smash::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
