#include "smash/quantize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "smash/error.hpp"

namespace smash {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

class SchemeParser {
 public:
  explicit SchemeParser(std::string_view text) : text_(text) {}

  QuantScheme parse() {
    QuantScheme scheme;
    skip_blanks();
    expect('D');
    scheme.detrend = unsigned_int();
    expect('N');
    const char flag = peek();
    if (flag != '0' && flag != '1') fail("'0' or '1' after 'N'");
    scheme.normalize = flag == '1';
    ++pos_;
    expect('[');
    skip_blanks();
    while (!at_end() && peek() != ']') {
      scheme.cutoffs.push_back(number());
      const std::size_t before = pos_;
      skip_blanks();
      if (!at_end() && peek() != ']' && pos_ == before) fail("blank or ']'");
    }
    expect(']');
    skip_blanks();
    if (!at_end()) fail("end of scheme");
    try {
      check_scheme(scheme);
    } catch (const InvalidArgument& e) {
      throw ParseError("invalid scheme '" + std::string(text_) + "': " + e.what());
    }
    return scheme;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_blanks() {
    while (!at_end() && is_blank(text_[pos_])) ++pos_;
  }

  std::string token() const {
    if (at_end()) return "end of input";
    std::size_t end = pos_;
    while (end < text_.size() && !is_blank(text_[end]) && text_[end] != ']') ++end;
    if (end == pos_) ++end;
    return "'" + std::string(text_.substr(pos_, end - pos_)) + "'";
  }

  [[noreturn]] void fail(const std::string& expected) const {
    std::ostringstream msg;
    msg << "scheme '" << text_ << "': expected " << expected << " at position "
        << pos_ << ", found " << token();
    throw ParseError(msg.str());
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("'") + c + "'");
    ++pos_;
  }

  std::size_t unsigned_int() {
    std::size_t value = 0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) fail("unsigned integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  double number() {
    std::size_t end = pos_;
    while (end < text_.size() && !is_blank(text_[end]) && text_[end] != ']') ++end;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) fail("finite number");
    pos_ = end;
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_cutoff(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) s += '.';
  return s;
}

}  // namespace

QuantScheme parse_scheme(std::string_view text) { return SchemeParser(text).parse(); }

void check_scheme(const QuantScheme& scheme) {
  if (scheme.cutoffs.empty()) {
    throw InvalidArgument("a scheme needs at least one cutoff");
  }
  for (std::size_t i = 0; i < scheme.cutoffs.size(); ++i) {
    if (!std::isfinite(scheme.cutoffs[i])) throw InvalidArgument("cutoffs must be finite");
    if (i > 0 && !(scheme.cutoffs[i - 1] < scheme.cutoffs[i])) {
      throw InvalidArgument("cutoffs must be strictly increasing");
    }
  }
}

std::string format_scheme(const QuantScheme& scheme) {
  std::string out = "D" + std::to_string(scheme.detrend) + "N" +
                    (scheme.normalize ? "1" : "0") + "[";
  for (std::size_t i = 0; i < scheme.cutoffs.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_cutoff(scheme.cutoffs[i]);
  }
  return out + "]";
}

std::vector<double> transform_series(std::span<const double> x, std::size_t detrend,
                                     bool normalize) {
  if (x.size() <= detrend) {
    throw DataError("series of length " + std::to_string(x.size()) +
                    " is too short to detrend " + std::to_string(detrend) + " times");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("series contains a non-finite value");
  }
  std::vector<double> v(x.begin(), x.end());
  for (std::size_t pass = 0; pass < detrend; ++pass) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
    v.pop_back();
  }
  if (normalize) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    double scale = 0.0;
    for (double e : v) {
      ss += (e - mean) * (e - mean);
      scale = std::max(scale, std::abs(e));
    }
    const double sd = std::sqrt(ss / n);
    if (!(sd > 1e-12 * scale)) {
      throw DataError("cannot normalize a series with zero variance");
    }
    for (double& e : v) e = (e - mean) / sd;
  }
  return v;
}

SymbolSeq apply_scheme(std::span<const double> x, const QuantScheme& scheme) {
  check_scheme(scheme);
  const auto v = transform_series(x, scheme.detrend, scheme.normalize);
  SymbolSeq out;
  out.reserve(v.size());
  for (double p : v) {
    const auto cell = std::upper_bound(scheme.cutoffs.begin(), scheme.cutoffs.end(), p);
    out.push_back(static_cast<Symbol>(cell - scheme.cutoffs.begin()));
  }
  return out;
}

std::vector<double> maxent_partition(const LabeledDataset& data, std::size_t detrend,
                                     bool normalize, std::size_t k,
                                     double quantile_shift) {
  if (k < 2) throw InvalidArgument("alphabet size must be >= 2");
  std::vector<double> pooled;
  for (const auto& series : data.series) {
    const auto v = transform_series(series, detrend, normalize);
    pooled.insert(pooled.end(), v.begin(), v.end());
  }
  if (pooled.empty()) throw DataError("no values to partition");
  std::sort(pooled.begin(), pooled.end());
  std::size_t distinct_count = 1;
  for (std::size_t i = 1; i < pooled.size(); ++i) {
    if (pooled[i] != pooled[i - 1]) ++distinct_count;
  }
  if (distinct_count < k) {
    throw DataError("only " + std::to_string(distinct_count) +
                    " distinct values; cannot form " + std::to_string(k) + " cells");
  }

  const double n = static_cast<double>(pooled.size());
  std::vector<double> cutoffs;
  double previous = pooled.front();
  for (std::size_t i = 1; i < k; ++i) {
    double level = static_cast<double>(i) / static_cast<double>(k) + quantile_shift;
    level = std::clamp(level, 0.0, 1.0);
    auto idx = static_cast<std::size_t>(std::floor(level * n));
    idx = std::clamp<std::size_t>(idx, 1, pooled.size() - 1);
    double cut = pooled[idx];
    if (cut <= previous) {
      auto it = std::upper_bound(pooled.begin(), pooled.end(), previous);
      if (it == pooled.end()) {
        throw DataError("ties leave no room for " + std::to_string(k) + " cells");
      }
      cut = *it;
    }
    cutoffs.push_back(cut);
    previous = cut;
  }
  return cutoffs;
}

ClassSeparation class_separation(const DistMatrix& d, std::span<const std::string> labels) {
  const std::size_t n = d.size();
  if (labels.size() != n) {
    throw DataError("have " + std::to_string(labels.size()) + " labels for " +
                    std::to_string(n) + " series");
  }
  ClassSeparation out;
  double same_sum = 0.0;
  double cross_sum = 0.0;
  bool offdiag_same = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[i] == labels[j]) {
        same_sum += d(i, j);
        ++out.same_pairs;
        if (i != j) offdiag_same = true;
      } else {
        cross_sum += d(i, j);
        ++out.cross_pairs;
      }
    }
  }
  if (out.cross_pairs == 0) {
    throw DataError("all series share one label; cross-label average is undefined");
  }
  out.diagonal_only = !offdiag_same;
  out.same = same_sum / static_cast<double>(out.same_pairs);
  out.cross = cross_sum / static_cast<double>(out.cross_pairs);
  if (!(out.cross > 0.0)) {
    throw DataError("every cross-label distance is zero; ratio is undefined");
  }
  out.ratio = out.same / out.cross;
  return out;
}

SearchResult scheme_search(const LabeledDataset& data, const SchemeGrid& grid,
                           std::span<const BaseSet> bases, CoordNorm norm) {
  if (data.labels.size() != data.series.size()) {
    throw DataError("scheme search needs one label per series");
  }
  SearchResult result;

  std::vector<QuantScheme> schemes;
  auto add = [&](QuantScheme s) {
    if (std::find(schemes.begin(), schemes.end(), s) == schemes.end()) {
      schemes.push_back(std::move(s));
    }
  };
  for (std::size_t d : grid.detrend) {
    for (bool nrm : grid.normalize) {
      for (std::size_t k : grid.alphabet_sizes) {
        for (double shift : grid.quantile_shifts) {
          try {
            add({d, nrm, maxent_partition(data, d, nrm, k, shift)});
          } catch (const Error& e) {
            std::ostringstream note;
            note << "D" << d << "N" << (nrm ? 1 : 0) << " k=" << k << " shift=" << shift
                 << ": " << e.what();
            result.notes.push_back(note.str());
          }
        }
      }
    }
  }
  for (const auto& s : grid.explicit_schemes) add(s);
  if (schemes.empty()) throw DataError("empty scheme grid");

  for (const auto& scheme : schemes) {
    const std::string name = format_scheme(scheme);
    const auto base = std::find_if(bases.begin(), bases.end(), [&](const BaseSet& b) {
      return b.alphabet_size() == scheme.alphabet_size();
    });
    if (base == bases.end()) {
      result.notes.push_back(name + ": no base set over " +
                             std::to_string(scheme.alphabet_size()) + " symbols");
      continue;
    }
    try {
      std::vector<SymbolSeq> symbols;
      symbols.reserve(data.series.size());
      for (const auto& series : data.series) symbols.push_back(apply_scheme(series, scheme));
      const DistMatrix dm = distance_matrix(symbols, *base, norm);
      result.ranking.push_back({scheme, class_separation(dm, data.labels)});
    } catch (const Error& e) {
      result.notes.push_back(name + ": " + e.what());
    }
  }
  if (result.ranking.empty()) {
    std::string msg = "every quantization scheme failed";
    for (const auto& note : result.notes) msg += "\n  " + note;
    throw DataError(msg);
  }
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [](const RankedScheme& a, const RankedScheme& b) {
                     return a.score.ratio < b.score.ratio;
                   });
  return result;
}

}  // namespace smash
