#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smash/metric.hpp"
#include "smash/pfsa.hpp"

namespace smash {

// PFSA files are JSON:
//   {"alphabet_size": k,
//    "states": [{"probs": [...], "next": {"0": j, ...}}, ...]}
// Keys of "next" are decimal symbols; a key is absent exactly where the
// probability is zero. Loading validates the machine.

/// Throws ParseError on malformed JSON and InvalidModel on invalid machines.
Pfsa pfsa_from_json(std::string_view text);
std::string pfsa_to_json(const Pfsa& m);

Pfsa load_pfsa(const std::filesystem::path& path);
void save_pfsa(const Pfsa& m, const std::filesystem::path& path);

/// Symbol files: one sequence per line, each symbol a single digit 0-9.
/// Empty lines are empty sequences; a final newline does not start a new one.
std::vector<SymbolSeq> read_symbol_lines(std::istream& in);
std::vector<SymbolSeq> read_symbol_file(const std::filesystem::path& path);
void write_symbol_lines(std::ostream& out, std::span<const SymbolSeq> seqs);

/// One real-valued series per row, comma separated; rows may differ in
/// length. Blank lines are skipped.
std::vector<std::vector<double>> read_csv_series(std::istream& in);
std::vector<std::vector<double>> read_csv_file(const std::filesystem::path& path);

/// One label per line; trailing blank lines are dropped.
std::vector<std::string> read_labels(std::istream& in);
std::vector<std::string> read_labels_file(const std::filesystem::path& path);

/// n rows of n comma-separated values written with 17 significant digits.
void write_matrix_csv(std::ostream& out, const DistMatrix& d);
DistMatrix read_matrix_csv(std::istream& in);

/// Plain (ASCII) PGM: "P2", "n n", "255", then one row of gray levels per
/// matrix row, mapping the minimum entry to 0 and the maximum to 255.
void write_pgm(std::ostream& out, const DistMatrix& d);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace smash
