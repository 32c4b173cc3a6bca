#include "smash/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "smash/error.hpp"

namespace smash {

using nlohmann::json;

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Pfsa pfsa_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("PFSA file is not valid JSON: ") + e.what());
  }
  std::size_t k = 0;
  std::vector<StateRecord> states;
  try {
    k = doc.at("alphabet_size").get<std::size_t>();
    for (const auto& st : doc.at("states")) {
      StateRecord record;
      record.probs = st.at("probs").get<std::vector<double>>();
      record.next.assign(k, std::nullopt);
      for (const auto& [key, target] : st.at("next").items()) {
        Symbol s = 0;
        auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), s);
        if (ec != std::errc() || ptr != key.data() + key.size() || s >= k) {
          throw ParseError("transition key '" + key + "' is not a symbol below " +
                           std::to_string(k));
        }
        record.next[s] = target.get<StateIndex>();
      }
      states.push_back(std::move(record));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed PFSA file: ") + e.what());
  }
  Pfsa m(k, std::move(states));
  require_valid(m);
  return m;
}

std::string pfsa_to_json(const Pfsa& m) {
  json doc;
  doc["alphabet_size"] = m.alphabet_size();
  doc["states"] = json::array();
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    json st;
    const auto row = m.row(q);
    st["probs"] = std::vector<double>(row.begin(), row.end());
    st["next"] = json::object();
    for (Symbol s = 0; s < m.alphabet_size(); ++s) {
      if (m.has_next(q, s)) st["next"][std::to_string(s)] = m.next_unchecked(q, s);
    }
    doc["states"].push_back(std::move(st));
  }
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Pfsa load_pfsa(const std::filesystem::path& path) {
  return pfsa_from_json(read_text_file(path));
}

void save_pfsa(const Pfsa& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << pfsa_to_json(m);
}

std::vector<SymbolSeq> read_symbol_lines(std::istream& in) {
  std::vector<SymbolSeq> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    SymbolSeq seq;
    seq.reserve(line.size());
    for (char c : line) {
      if (c < '0' || c > '9') {
        throw ParseError("symbol file line " + std::to_string(line_no) +
                         ": unexpected character '" + std::string(1, c) + "'");
      }
      seq.push_back(static_cast<Symbol>(c - '0'));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

std::vector<SymbolSeq> read_symbol_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_symbol_lines(in);
}

void write_symbol_lines(std::ostream& out, std::span<const SymbolSeq> seqs) {
  std::string line;
  for (const auto& seq : seqs) {
    line.clear();
    for (Symbol s : seq) {
      if (s > 9) throw InvalidArgument("symbol files hold single digits; got " + std::to_string(s));
      line.push_back(static_cast<char>('0' + s));
    }
    out << line << '\n';
  }
}

std::vector<std::vector<double>> read_csv_series(std::istream& in) {
  std::vector<std::vector<double>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError("CSV line " + std::to_string(line_no) + ": bad number '" +
                         std::string(cell) + "'");
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::vector<double>> read_csv_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_csv_series(in);
}

std::vector<std::string> read_labels(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.emplace_back(trim(strip_cr(line)));
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::vector<std::string> read_labels_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_labels(in);
}

void write_matrix_csv(std::ostream& out, const DistMatrix& d) {
  char buf[32];
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (j > 0) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", d(i, j));
      out << buf;
    }
    out << '\n';
  }
}

DistMatrix read_matrix_csv(std::istream& in) {
  const auto rows = read_csv_series(in);
  DistMatrix d(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      throw ParseError("matrix row " + std::to_string(i) + " has " +
                       std::to_string(rows[i].size()) + " entries, expected " +
                       std::to_string(rows.size()));
    }
    for (std::size_t j = 0; j < rows.size(); ++j) d(i, j) = rows[i][j];
  }
  return d;
}

void write_pgm(std::ostream& out, const DistMatrix& d) {
  const std::size_t n = d.size();
  double lo = 0.0;
  double hi = 0.0;
  if (n > 0) {
    const auto v = d.values();
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    lo = *mn;
    hi = *mx;
  }
  out << "P2\n" << n << ' ' << n << "\n255\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const long level =
          hi > lo ? std::lround((d(i, j) - lo) / (hi - lo) * 255.0) : 0L;
      if (j > 0) out << ' ';
      out << std::clamp(level, 0L, 255L);
    }
    out << '\n';
  }
}

}  // namespace smash
