#pragma once

// Domain types for believed-equivalence testing over real-valued inputs:
// categories and their elements, categorizations, test cases, evaluation
// values and cell signatures.
//
// Conventions used throughout the library:
//  * categories and input dimensions are indexed from 0;
//  * element indices are 1-based, element j of a partition category being
//    the half-open interval (boundaries[j-1], boundaries[j]];
//  * boundary comparisons are exact IEEE-754 comparisons.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "beqtest/error.hpp"
#include "beqtest/format.hpp"

namespace beq {

/// Discrete, totally ordered result of an evaluation function. A single
/// class index is a one-element tuple.
struct EvalValue {
  std::vector<std::int64_t> parts;

  EvalValue() = default;
  explicit EvalValue(std::int64_t value) : parts{value} {}
  explicit EvalValue(std::vector<std::int64_t> values) : parts(std::move(values)) {}

  auto operator<=>(const EvalValue&) const = default;
  bool operator==(const EvalValue&) const = default;

  std::string to_string() const {
    if (parts.size() == 1) return std::to_string(parts.front());
    std::string text = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) text += ',';
      text += std::to_string(parts[i]);
    }
    return text + ")";
  }
};

/// Half-open input range (lower, upper].
struct Bound {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x) const { return x > lower && x <= upper; }
  double width() const { return upper - lower; }
};

inline void require_in_bounds(std::span<const double> x, std::span<const Bound> bounds) {
  if (x.size() != bounds.size())
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                  " coordinates, expected " + std::to_string(bounds.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!bounds[i].contains(x[i]))
      throw Error(ErrorKind::OutOfBounds, "x" + std::to_string(i + 1) + "=" + format_double(x[i]) +
                                              " outside (" + format_double(bounds[i].lower) + ", " +
                                              format_double(bounds[i].upper) + "]");
  }
}

/// Category that splits one input coordinate into consecutive intervals.
class SimplePartitionCategory {
 public:
  SimplePartitionCategory(std::size_t dimension, std::vector<double> boundaries,
                          std::vector<std::string> element_labels = {})
      : dimension_(dimension), boundaries_(std::move(boundaries)), labels_(std::move(element_labels)) {
    if (boundaries_.size() < 2)
      throw Error(ErrorKind::InvalidCategorization, "a partition needs at least two boundaries");
    for (std::size_t k = 1; k < boundaries_.size(); ++k) {
      if (!(boundaries_[k - 1] < boundaries_[k]))
        throw Error(ErrorKind::InvalidCategorization, "partition boundaries must be strictly ascending");
    }
    if (!labels_.empty() && labels_.size() != element_count())
      throw Error(ErrorKind::InvalidCategorization, "one label per element expected");
  }

  std::size_t dimension() const { return dimension_; }
  const std::vector<double>& boundaries() const { return boundaries_; }
  const std::vector<std::string>& element_labels() const { return labels_; }
  std::size_t element_count() const { return boundaries_.size() - 1; }
  double lower() const { return boundaries_.front(); }
  double upper() const { return boundaries_.back(); }

  /// Interval (first, second] of the 1-based element `j`.
  std::pair<double, double> element_interval(std::size_t j) const {
    if (j < 1 || j > element_count())
      throw Error(ErrorKind::UnknownElement, "element " + std::to_string(j) + " of " +
                                                 std::to_string(element_count()));
    return {boundaries_[j - 1], boundaries_[j]};
  }

  std::size_t element_of(double x) const {
    if (!(x > boundaries_.front()) || !(x <= boundaries_.back()))
      throw Error(ErrorKind::OutOfBounds, format_double(x) + " outside (" + format_double(lower()) + ", " +
                                              format_double(upper()) + "]");
    auto it = std::lower_bound(boundaries_.begin() + 1, boundaries_.end(), x);
    return static_cast<std::size_t>(it - boundaries_.begin());
  }

  /// Splits element `j` at `beta` into (a, beta] and (beta, b].
  SimplePartitionCategory with_cut(std::size_t j, double beta) const {
    auto [a, b] = element_interval(j);
    if (!(beta > a) || !(beta < b))
      throw Error(ErrorKind::InvalidCut, "cut " + format_double(beta) + " not strictly inside (" +
                                             format_double(a) + ", " + format_double(b) + "]");
    std::vector<double> next = boundaries_;
    next.insert(next.begin() + static_cast<std::ptrdiff_t>(j), beta);
    std::vector<std::string> labels;
    if (!labels_.empty()) {
      labels = labels_;
      const std::string base = labels_[j - 1];
      labels[j - 1] = base + ".1";
      labels.insert(labels.begin() + static_cast<std::ptrdiff_t>(j), base + ".2");
    }
    return SimplePartitionCategory(dimension_, std::move(next), std::move(labels));
  }

 private:
  std::size_t dimension_;
  std::vector<double> boundaries_;
  std::vector<std::string> labels_;
};

/// Axis-aligned L-infinity ball {z : |z_i - center_i| <= radius}.
struct LinfBall {
  std::vector<double> center;
  double radius = 0.0;

  bool contains(std::span<const double> x) const {
    if (x.size() != center.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(std::abs(x[i] - center[i]) <= radius)) return false;
    }
    return true;
  }
};

/// Named Boolean test over whole input vectors. `ball` is set when the
/// predicate is the built-in ball membership test, which makes it
/// serializable.
struct Predicate {
  std::string name;
  std::function<bool(std::span<const double>)> test;
  std::optional<LinfBall> ball;

  static Predicate within_ball(LinfBall ball, std::string name = "near") {
    Predicate p;
    p.name = std::move(name);
    p.test = [ball](std::span<const double> x) { return ball.contains(x); };
    p.ball = std::move(ball);
    return p;
  }
};

/// Category whose elements are arbitrary predicates; exactly one of them
/// must hold on every input it is asked about.
class PredicateCategory {
 public:
  PredicateCategory(std::string name, std::vector<Predicate> elements)
      : name_(std::move(name)), elements_(std::move(elements)) {
    if (elements_.empty()) throw Error(ErrorKind::InvalidCategorization, "predicate category without elements");
    for (const auto& e : elements_) {
      if (!e.test) throw Error(ErrorKind::InvalidCategorization, "element '" + e.name + "' has no test");
    }
  }

  /// Two-element category {not p, p} produced by refinement-by-expansion.
  static PredicateCategory expansion(std::string name, const Predicate& p) {
    Predicate outside;
    outside.name = "not_" + p.name;
    outside.test = [t = p.test](std::span<const double> x) { return !t(x); };
    return PredicateCategory(std::move(name), {std::move(outside), p});
  }

  const std::string& name() const { return name_; }
  const std::vector<Predicate>& elements() const { return elements_; }
  std::size_t element_count() const { return elements_.size(); }

  /// The ball behind an expansion category, if it is one.
  const std::optional<LinfBall>& expansion_ball() const { return elements_.back().ball; }

  std::size_t element_of(std::span<const double> x) const {
    std::size_t hit = 0;
    std::size_t matches = 0;
    for (std::size_t j = 0; j < elements_.size(); ++j) {
      if (elements_[j].test(x)) {
        hit = j + 1;
        ++matches;
      }
    }
    if (matches != 1)
      throw Error(ErrorKind::PredicateNotTotal, "category '" + name_ + "' matched " + std::to_string(matches) +
                                                    " elements");
    return hit;
  }

 private:
  std::string name_;
  std::vector<Predicate> elements_;
};

using Category = std::variant<SimplePartitionCategory, PredicateCategory>;

inline std::size_t element_count(const Category& c) {
  return std::visit([](const auto& cat) { return cat.element_count(); }, c);
}

inline std::size_t element_of(const SimplePartitionCategory& category, double x) {
  return category.element_of(x);
}

inline std::size_t element_of(const Category& c, std::span<const double> x) {
  if (const auto* p = std::get_if<SimplePartitionCategory>(&c)) {
    if (p->dimension() >= x.size())
      throw Error(ErrorKind::DimensionMismatch, "category on x" + std::to_string(p->dimension() + 1) +
                                                    " but input has " + std::to_string(x.size()) + " coordinates");
    return p->element_of(x[p->dimension()]);
  }
  return std::get<PredicateCategory>(c).element_of(x);
}

/// Tuple of 1-based element indices, one per category, tagged with the
/// revision of the categorization that produced it.
struct CellSignature {
  std::uint64_t revision = 0;
  std::vector<std::uint32_t> elements;

  auto operator<=>(const CellSignature&) const = default;
  bool operator==(const CellSignature&) const = default;

  std::string to_string() const {
    std::string text = "(";
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (i) text += ',';
      text += std::to_string(elements[i]);
    }
    return text + ")";
  }
};

/// Ordered set of categories. Every refinement yields a new value with a
/// larger revision; instances are never mutated in place.
class Categorization {
 public:
  Categorization() = default;
  explicit Categorization(std::vector<Category> categories, std::uint64_t revision = 0)
      : categories_(std::move(categories)), revision_(revision) {
    std::vector<std::size_t> seen;
    for (const auto& c : categories_) {
      if (const auto* p = std::get_if<SimplePartitionCategory>(&c)) {
        if (std::find(seen.begin(), seen.end(), p->dimension()) != seen.end())
          throw Error(ErrorKind::InvalidCategorization,
                      "two partition categories on x" + std::to_string(p->dimension() + 1));
        seen.push_back(p->dimension());
      }
    }
  }

  const std::vector<Category>& categories() const { return categories_; }
  const Category& operator[](std::size_t i) const { return categories_.at(i); }
  std::size_t size() const { return categories_.size(); }
  bool empty() const { return categories_.empty(); }
  std::uint64_t revision() const { return revision_; }

  std::vector<std::size_t> element_counts() const {
    std::vector<std::size_t> counts;
    counts.reserve(categories_.size());
    for (const auto& c : categories_) counts.push_back(element_count(c));
    return counts;
  }

  const SimplePartitionCategory* partition(std::size_t category) const {
    return std::get_if<SimplePartitionCategory>(&categories_.at(category));
  }

  std::optional<std::size_t> category_for_dimension(std::size_t dimension) const {
    for (std::size_t i = 0; i < categories_.size(); ++i) {
      const auto* p = std::get_if<SimplePartitionCategory>(&categories_[i]);
      if (p && p->dimension() == dimension) return i;
    }
    return std::nullopt;
  }

  Categorization with_category(std::size_t index, Category replacement) const {
    std::vector<Category> next = categories_;
    next.at(index) = std::move(replacement);
    return Categorization(std::move(next), revision_ + 1);
  }

  Categorization with_appended(Category extra) const {
    std::vector<Category> next = categories_;
    next.push_back(std::move(extra));
    return Categorization(std::move(next), revision_ + 1);
  }

 private:
  std::vector<Category> categories_;
  std::uint64_t revision_ = 0;
};

struct TestCase {
  std::string id;
  std::vector<double> x;
  std::vector<double> output;
  EvalValue eval;
  std::optional<std::int64_t> label;
};

inline CellSignature signature_of(const Categorization& cat, std::span<const double> x) {
  CellSignature sig;
  sig.revision = cat.revision();
  sig.elements.reserve(cat.size());
  for (const auto& c : cat.categories()) sig.elements.push_back(static_cast<std::uint32_t>(element_of(c, x)));
  return sig;
}

inline Categorization initialize_from_bounds(std::span<const Bound> bounds) {
  std::vector<Category> categories;
  categories.reserve(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(bounds[i].lower < bounds[i].upper))
      throw Error(ErrorKind::InvalidBound, "x" + std::to_string(i + 1) + ": lower bound " +
                                               format_double(bounds[i].lower) + " not below upper bound " +
                                               format_double(bounds[i].upper));
    categories.emplace_back(SimplePartitionCategory(i, {bounds[i].lower, bounds[i].upper}));
  }
  return Categorization(std::move(categories), 0);
}

}  // namespace beq
