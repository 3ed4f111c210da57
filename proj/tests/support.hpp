#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.
// Oracles deliberately avoid the library's own lookup structures: membership
// is a linear scan, believed equivalence is an O(n^2) pairwise comparison and
// coverage is a nested-loop enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "beqtest/beqtest.hpp"

namespace beqtest_support {

using namespace beq;

// ------------------------------------------------------------------ oracles

inline std::size_t oracle_element(const std::vector<double>& boundaries, double x) {
  for (std::size_t j = 1; j < boundaries.size(); ++j)
    if (x > boundaries[j - 1] && x <= boundaries[j]) return j;
  return 0;
}

inline std::vector<std::size_t> oracle_signature(const Categorization& cat, const std::vector<double>& x) {
  std::vector<std::size_t> sig;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    if (const auto* p = cat.partition(i)) {
      sig.push_back(oracle_element(p->boundaries(), x[p->dimension()]));
    } else {
      const auto& pc = std::get<PredicateCategory>(cat.categories()[i]);
      std::size_t hit = 0;
      for (std::size_t e = 0; e < pc.elements().size(); ++e)
        if (pc.elements()[e].test(x)) hit = e + 1;
      sig.push_back(hit);
    }
  }
  return sig;
}

/// Believed equivalence checked over every pair of cases.
inline bool pairwise_holds(const std::vector<TestCase>& cases, const Categorization& cat) {
  std::vector<std::vector<std::size_t>> sigs;
  for (const auto& c : cases) sigs.push_back(oracle_signature(cat, c.x));
  for (std::size_t a = 0; a < cases.size(); ++a)
    for (std::size_t b = a + 1; b < cases.size(); ++b)
      if (sigs[a] == sigs[b] && !(cases[a].eval == cases[b].eval)) return false;
  return true;
}

/// Number of distinct (cell, value) pairs beyond the first value per cell.
inline std::size_t pairwise_violation_count(const std::vector<TestCase>& cases, const Categorization& cat) {
  std::map<std::vector<std::size_t>, std::set<EvalValue>> values;
  for (const auto& c : cases) values[oracle_signature(cat, c.x)].insert(c.eval);
  std::size_t n = 0;
  for (const auto& [sig, vals] : values) n += vals.size() - 1;
  return n;
}

struct BruteCoverage {
  std::uint64_t total = 0;
  std::uint64_t covered = 0;
  std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> uncovered;
};

/// Enumerates every gamma-subset of categories (nested index loops built by
/// recursion) and every element tuple, scanning all cases for each tuple.
inline BruteCoverage brute_coverage(const std::vector<TestCase>& cases, const Categorization& cat, std::size_t gamma) {
  BruteCoverage out;
  std::vector<std::vector<std::size_t>> sigs;
  for (const auto& c : cases) sigs.push_back(oracle_signature(cat, c.x));
  const auto counts = cat.element_counts();
  const std::size_t m = counts.size();
  std::vector<std::size_t> subset;
  auto tuples = [&](const std::vector<std::size_t>& cats) {
    std::vector<std::size_t> elems(cats.size(), 1);
    while (true) {
      ++out.total;
      bool hit = false;
      for (const auto& s : sigs) {
        bool match = true;
        for (std::size_t k = 0; k < cats.size(); ++k) match = match && s[cats[k]] == elems[k];
        hit = hit || match;
      }
      if (hit) ++out.covered;
      else out.uncovered.insert({cats, elems});
      std::size_t k = cats.size();
      while (k > 0) {
        --k;
        if (++elems[k] <= counts[cats[k]]) break;
        elems[k] = 1;
        if (k == 0) return;
      }
      if (cats.empty()) return;
    }
  };
  std::function<void(std::size_t)> choose = [&](std::size_t from) {
    if (subset.size() == gamma) {
      tuples(subset);
      return;
    }
    for (std::size_t i = from; i < m; ++i) {
      subset.push_back(i);
      choose(i + 1);
      subset.pop_back();
    }
  };
  choose(0);
  return out;
}

// ----------------------------------------------------------------- fixtures

/// Case with a directly assigned evaluation value (no network involved).
inline TestCase tc(std::string id, std::vector<double> x, std::int64_t value) {
  TestCase c;
  c.id = std::move(id);
  c.x = std::move(x);
  c.eval = EvalValue(value);
  return c;
}

inline Categorization partitions(std::vector<std::vector<double>> boundaries) {
  std::vector<Category> cats;
  for (std::size_t i = 0; i < boundaries.size(); ++i) cats.emplace_back(SimplePartitionCategory(i, boundaries[i]));
  return Categorization(std::move(cats));
}

/// Evenly spaced boundaries over (0, 1] with `elements` elements.
inline std::vector<double> even_boundaries(std::size_t elements) {
  std::vector<double> b;
  for (std::size_t j = 0; j <= elements; ++j) b.push_back(static_cast<double>(j) / static_cast<double>(elements));
  return b;
}

/// Random categorization of m partitions over (0, 1] with 1..max_elements
/// elements each, boundaries on a 1/64 lattice.
inline Categorization random_categorization(std::mt19937_64& rng, std::size_t m, std::size_t max_elements) {
  std::vector<std::vector<double>> bs;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t e = std::uniform_int_distribution<std::size_t>(1, max_elements)(rng);
    std::set<int> cuts;
    while (cuts.size() < e - 1) cuts.insert(std::uniform_int_distribution<int>(1, 63)(rng));
    std::vector<double> b{0.0};
    for (int c : cuts) b.push_back(c / 64.0);
    b.push_back(1.0);
    bs.push_back(std::move(b));
  }
  return partitions(std::move(bs));
}

/// Random point in (0, 1]^m; coordinates drawn on a 1/128 lattice (offset
/// by 1/256 to avoid boundaries) or continuously.
inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t m, bool lattice = false) {
  std::vector<double> x(m);
  for (auto& v : x) {
    if (lattice) v = (std::uniform_int_distribution<int>(0, 127)(rng) + 0.5) / 128.0;
    else v = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  return x;
}

/// h = relu(x - 0.5), y = h over x in (0, 1]; buckets [0, 0.1), [0.1, 0.5].
inline ModuleUnderTest single_neuron_module() {
  ReluNetwork net({DenseLayer{{{1.0}}, {-0.5}}, DenseLayer{{{1.0}}, {0.0}}}, {Bound{0.0, 1.0}});
  return ModuleUnderTest{std::move(net), OutputBucket{{0.0, 0.1, 0.5}, 0}};
}

/// h1 = relu(x1 - x2), h2 = relu(x1 + x2 - 1), y = h1 + 2 h2 - 0.25 over
/// (0, 1]^2; buckets [-0.5, 0), [0, 1.75].
inline ModuleUnderTest two_two_one_module() {
  ReluNetwork net({DenseLayer{{{1.0, -1.0}, {1.0, 1.0}}, {0.0, -1.0}}, DenseLayer{{{1.0, 2.0}}, {-0.25}}},
                  {Bound{0.0, 1.0}, Bound{0.0, 1.0}});
  return ModuleUnderTest{std::move(net), OutputBucket{{-0.5, 0.0, 1.75}, 0}};
}

/// The 1-D module flipping at x = 0.5 used by the probing and radius tests.
inline ModuleUnderTest flip_module() { return ModuleUnderTest{toy_flip_network(), OutputBucket{{-1.0, 0.5, 1.0}, 0}}; }

// ----------------------------------------------------------------- LP reader

struct ParsedLp {
  std::vector<std::string> comments;
  std::string objective;
  std::vector<LinearConstraint> constraints;
  std::map<std::string, VariableBound> bounds;
  std::vector<std::string> binaries;
};

inline double lp_number(const std::string& s) {
  if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

/// Reads the LP subset emitted by write_lp; throws on anything else.
inline ParsedLp read_lp(const std::string& text) {
  ParsedLp lp;
  std::istringstream in(text);
  std::string line;
  std::string section;
  bool ended = false;
  while (std::getline(in, line)) {
    if (ended) throw std::runtime_error("content after End");
    if (line.rfind("\\ ", 0) == 0) {
      if (!section.empty()) throw std::runtime_error("comment inside a section");
      lp.comments.push_back(line.substr(2));
      continue;
    }
    if (line == "Maximize" || line == "Subject To" || line == "Bounds" || line == "Binaries") {
      section = line;
      continue;
    }
    if (line == "End") {
      ended = true;
      continue;
    }
    if (line.empty() || line[0] != ' ') throw std::runtime_error("unexpected line '" + line + "'");
    std::istringstream toks(line);
    std::vector<std::string> t;
    for (std::string w; toks >> w;) t.push_back(w);
    if (section == "Maximize") {
      if (t.size() != 2 || t[0] != "obj:") throw std::runtime_error("bad objective");
      lp.objective = t[1];
    } else if (section == "Subject To") {
      LinearConstraint c;
      if (t.size() < 4 || t[0].back() != ':') throw std::runtime_error("bad constraint '" + line + "'");
      c.name = t[0].substr(0, t[0].size() - 1);
      std::size_t k = 1;
      double sign = 1.0;
      while (k < t.size() && t[k] != "<=" && t[k] != ">=" && t[k] != "=") {
        if (t[k] == "+" || t[k] == "-") {
          sign = t[k] == "-" ? -1.0 : 1.0;
          ++k;
          continue;
        }
        double coef = 1.0;
        if (std::isdigit(static_cast<unsigned char>(t[k][0])) || t[k][0] == '.') coef = lp_number(t[k++]);
        if (k >= t.size()) throw std::runtime_error("dangling coefficient");
        c.terms.push_back({sign * coef, t[k++]});
        sign = 1.0;
      }
      if (k + 2 != t.size()) throw std::runtime_error("bad constraint tail '" + line + "'");
      c.sense = t[k] == "<=" ? Sense::LessEqual : t[k] == ">=" ? Sense::GreaterEqual : Sense::Equal;
      c.rhs = lp_number(t[k + 1]);
      lp.constraints.push_back(std::move(c));
    } else if (section == "Bounds") {
      if (t.size() == 3 && t[1] == "=") {
        const double v = lp_number(t[2]);
        lp.bounds[t[0]] = VariableBound{v, v};
      } else if (t.size() == 5 && t[1] == "<=" && t[3] == "<=") {
        lp.bounds[t[2]] = VariableBound{lp_number(t[0]), lp_number(t[4])};
      } else {
        throw std::runtime_error("bad bound '" + line + "'");
      }
    } else if (section == "Binaries") {
      if (t.size() != 1) throw std::runtime_error("bad binary line");
      lp.binaries.push_back(t[0]);
    } else {
      throw std::runtime_error("line outside a section");
    }
  }
  if (!ended) throw std::runtime_error("missing End");
  return lp;
}

// ------------------------------------------------------------------- files

inline std::string golden_path(const std::string& name) { return std::string(BEQTEST_GOLDEN_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("beqtest_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace beqtest_support
