#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smash/error.hpp"
#include "smash/quantize.hpp"
#include "support/generators.hpp"
#include "support/machines.hpp"
#include "support/oracles.hpp"

using namespace smash;
using namespace smash::testing;

TEST_SUITE("quantize") {

TEST_CASE("literal schemes") {
  const auto a = parse_scheme("D1N1[3.]");
  CHECK(a.detrend == 1);
  CHECK(a.normalize);
  CHECK(a.cutoffs == std::vector<double>{3.0});

  const auto b = parse_scheme("D0N0[-15.]");
  CHECK(b.detrend == 0);
  CHECK_FALSE(b.normalize);
  CHECK(b.cutoffs == std::vector<double>{-15.0});

  CHECK(format_scheme(parse_scheme("D0N1[-0.4526]")) == "D0N1[-0.4526]");
  CHECK(format_scheme(a) == "D1N1[3.]");
  CHECK(format_scheme(parse_scheme("  D2N0[ -1   0.25\t7 ] ")) == "D2N0[-1. 0.25 7.]");
  CHECK(parse_scheme("D0N0[1e-3 2E2]").cutoffs == std::vector<double>{1e-3, 200.0});
  CHECK(a.alphabet_size() == 2);
}

TEST_CASE("parse/format round trip on a fuzzed corpus") {
  std::mt19937_64 rng(500);
  for (int trial = 0; trial < 500; ++trial) {
    const QuantScheme s = random_scheme(rng);
    const std::string text = format_scheme(s);
    REQUIRE(parse_scheme(text) == s);
    CHECK(format_scheme(parse_scheme(text)) == text);
    CHECK(format_scheme(parse_scheme(loosen(text, rng))) == text);
  }
}

TEST_CASE("malformed schemes") {
  for (const char* bad : {"", "D", "X1N1[3.]", "d1N1[3.]", "D1N2[3.]", "DN1[3.]", "D-1N0[1.]",
                          "D1N1[]", "D1N1[3.", "D1N1 3.]", "D1N1[3.]x", "D1N1[abc]",
                          "D1N1[3. 2.]", "D1N1[1. 1.]", "D1N1[inf]", "D1N1[nan]",
                          "D1N1[1.,2.]", "D1 N1[3.]"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_scheme(bad), ParseError);
  }
  try {
    parse_scheme("D1N1[3. oops]");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("oops") != std::string::npos);
  }
}

TEST_CASE("apply scheme examples") {
  const std::vector<double> a{0.1, 0.9, 0.4};
  CHECK(apply_scheme(a, parse_scheme("D0N0[0.5]")) == seq("010"));
  const std::vector<double> b{1, 3, 2};
  CHECK(apply_scheme(b, parse_scheme("D1N0[0.]")) == seq("10"));
  // A value equal to a cutoff belongs to the upper cell.
  const std::vector<double> edge{0.5, 0.49999};
  CHECK(apply_scheme(edge, parse_scheme("D0N0[0.5]")) == seq("10"));
  // Second differences of a quadratic are constant.
  const std::vector<double> quad{0, 1, 4, 9, 16};
  CHECK(apply_scheme(quad, parse_scheme("D2N0[1. 3.]")) == seq("111"));
  const std::vector<double> constant(20, 4.0);
  CHECK_THROWS_AS(apply_scheme(constant, parse_scheme("D0N1[0.]")), DataError);
  CHECK_THROWS_AS(apply_scheme(b, parse_scheme("D3N0[0.]")), DataError);
}

TEST_CASE("apply scheme: output length and symbol range") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise;
  for (int trial = 0; trial < 200; ++trial) {
    QuantScheme s = random_scheme(rng);
    s.detrend %= 4;
    std::vector<double> x(5 + rng() % 50);
    for (double& v : x) v = noise(rng) * 3.0;
    const auto out = apply_scheme(x, s);
    CHECK(out.size() == x.size() - s.detrend);
    for (Symbol sym : out) CHECK(sym < s.alphabet_size());
  }
}

TEST_CASE("normalization is per series") {
  const std::vector<double> x{1, 2, 3, 4};
  const auto v = transform_series(x, 0, true);
  double mean = 0.0, var = 0.0;
  for (double e : v) mean += e / 4.0;
  for (double e : v) var += (e - mean) * (e - mean) / 4.0;
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  // Shifting and scaling a series leaves its normalized symbols unchanged.
  std::vector<double> y;
  for (double e : x) y.push_back(100.0 + 7.0 * e);
  CHECK(apply_scheme(x, parse_scheme("D0N1[0.]")) == apply_scheme(y, parse_scheme("D0N1[0.]")));
}

TEST_CASE("maxent partition") {
  std::mt19937_64 rng(12);
  SUBCASE("uniform median") {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LabeledDataset data;
    for (int s = 0; s < 10; ++s) {
      data.series.emplace_back(1000);
      for (double& v : data.series.back()) v = u(rng);
    }
    const auto cut = maxent_partition(data, 0, false, 2);
    REQUIRE(cut.size() == 1);
    CHECK(std::abs(cut[0] - 0.5) <= 0.01);
  }
  SUBCASE("symbol frequencies near uniform") {
    std::normal_distribution<double> g;
    for (std::size_t k : {2u, 3u, 4u, 7u}) {
      LabeledDataset data;
      for (int s = 0; s < 4; ++s) {
        data.series.emplace_back(2500);
        for (double& v : data.series.back()) v = g(rng);
      }
      const QuantScheme scheme{0, false, maxent_partition(data, 0, false, k)};
      std::vector<double> counts(k, 0.0);
      double total = 0.0;
      for (const auto& series : data.series) {
        for (Symbol s : apply_scheme(series, scheme)) {
          counts[s] += 1.0;
          total += 1.0;
        }
      }
      for (double c : counts) {
        CHECK(std::abs(c / total - 1.0 / static_cast<double>(k)) <= 2.0 / std::sqrt(total));
      }
    }
  }
  SUBCASE("tied values") {
    LabeledDataset ones{{{1, 1, 1}}, {}};
    CHECK_THROWS_AS(maxent_partition(ones, 0, false, 2), DataError);
    LabeledDataset lumpy{{{0, 0, 0, 0, 0, 0, 1, 2}}, {}};
    const auto cut = maxent_partition(lumpy, 0, false, 3);
    CHECK(cut == std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(maxent_partition(lumpy, 0, false, 4), DataError);
  }
  SUBCASE("quantile shift moves the cut") {
    LabeledDataset data{{{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}, {}};
    CHECK(maxent_partition(data, 0, false, 2).front() == 5.0);
    CHECK(maxent_partition(data, 0, false, 2, 0.2).front() == 7.0);
    CHECK(maxent_partition(data, 0, false, 2, -0.2).front() == 3.0);
  }
}

TEST_CASE("class separation") {
  DistMatrix d(4);
  const std::vector<std::string> labels{"a", "a", "b", "b"};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      d(i, j) = labels[i] == labels[j] ? 0.2 : 1.0;
    }
  }
  const auto r = class_separation(d, labels);
  CHECK(r.same == doctest::Approx(0.1));
  CHECK(r.cross == doctest::Approx(1.0));
  CHECK(r.ratio == doctest::Approx(0.1));
  CHECK(r.same_pairs == 8);
  CHECK(r.cross_pairs == 8);
  CHECK_FALSE(r.diagonal_only);

  SUBCASE("block constant with zero intra distance") {
    DistMatrix z = d;
    z(0, 1) = z(1, 0) = z(2, 3) = z(3, 2) = 0.0;
    CHECK(class_separation(z, labels).ratio == 0.0);
  }
  SUBCASE("scale invariance") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    DistMatrix m(6);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) m(i, j) = m(j, i) = u(rng);
    }
    const std::vector<std::string> l{"x", "y", "x", "z", "y", "x"};
    for (double c : {0.001, 3.0, 1e6}) {
      DistMatrix scaled(6);
      for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) scaled(i, j) = c * m(i, j);
      }
      CHECK(class_separation(scaled, l).ratio ==
            doctest::Approx(class_separation(m, l).ratio).epsilon(1e-12));
    }
  }
  SUBCASE("errors and degenerate labelings") {
    CHECK_THROWS_AS(class_separation(d, std::vector<std::string>(4, "a")), DataError);
    CHECK_THROWS_AS(class_separation(d, std::vector<std::string>{"a", "b"}), DataError);
    const auto distinct = class_separation(d, std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(distinct.diagonal_only);
    CHECK(distinct.same == 0.0);
    CHECK_THROWS_AS(class_separation(DistMatrix(3), std::vector<std::string>{"a", "a", "b"}),
                    DataError);
  }
}

TEST_CASE("scheme search") {
  // G/H sequences written out as 0.0/1.0 values so the identity scheme applies.
  LabeledDataset data;
  for (int i = 0; i < 40; ++i) {
    const bool is_g = i < 20;
    const auto x = sample(is_g ? machine_g() : machine_h(), 500, 7000 + i);
    data.series.emplace_back(x.begin(), x.end());
    data.labels.push_back(is_g ? "G" : "H");
  }
  const std::vector<BaseSet> bases{default_base_set()};
  const QuantScheme identity = parse_scheme("D0N0[0.5]");

  SUBCASE("identity scheme separates the classes") {
    SchemeGrid grid;
    grid.explicit_schemes = {identity};
    grid.detrend = {0, 1};
    grid.normalize = {false, true};
    const auto result = scheme_search(data, grid, bases);
    bool found = false;
    for (std::size_t i = 0; i < result.ranking.size(); ++i) {
      if (i > 0) CHECK(result.ranking[i - 1].score.ratio <= result.ranking[i].score.ratio);
      if (result.ranking[i].scheme == identity) {
        found = true;
        CHECK(result.ranking[i].score.ratio < 1.0);
      }
    }
    CHECK(found);
  }
  SUBCASE("a single scheme gives a single entry") {
    SchemeGrid grid;
    grid.detrend = {};
    grid.explicit_schemes = {identity};
    const auto result = scheme_search(data, grid, bases);
    REQUIRE(result.ranking.size() == 1);
    CHECK(result.ranking[0].scheme == identity);
  }
  SUBCASE("shuffled labels do worse") {
    SchemeGrid grid;
    grid.explicit_schemes = {identity};
    const double truth = scheme_search(data, grid, bases).ranking.front().score.ratio;
    std::mt19937_64 rng(55);
    std::vector<double> shuffled;
    for (int rep = 0; rep < 5; ++rep) {
      LabeledDataset copy = data;
      std::shuffle(copy.labels.begin(), copy.labels.end(), rng);
      shuffled.push_back(scheme_search(copy, grid, bases).ranking.front().score.ratio);
    }
    std::sort(shuffled.begin(), shuffled.end());
    CHECK(shuffled[2] > truth);
  }
  SUBCASE("schemes without a matching base set are noted and skipped") {
    SchemeGrid grid;
    grid.alphabet_sizes = {2, 3};
    grid.explicit_schemes = {};
    const auto result = scheme_search(data, grid, bases);
    CHECK(result.ranking.size() == 1);
    CHECK(result.notes.size() == 1);
  }
  SUBCASE("all schemes failing is an error") {
    SchemeGrid grid;
    grid.detrend = {};
    grid.explicit_schemes = {parse_scheme("D0N0[0.1 0.5]")};
    CHECK_THROWS_AS(scheme_search(data, grid, bases), DataError);
  }
  SUBCASE("labels are required") {
    LabeledDataset unlabeled{data.series, {}};
    CHECK_THROWS_AS(scheme_search(unlabeled, SchemeGrid{}, bases), DataError);
  }
}

}  // TEST_SUITE
