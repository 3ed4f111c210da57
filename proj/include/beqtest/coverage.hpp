#pragma once

// Combinatorial coverage over categorizations: full-combination counts,
// gamma-way coverage and the worst-case cost of restoring coverage after a
// refinement introduces a new element.
//
// Category subsets are distinct and unordered, enumerated in lexicographic
// order; element tuples over a subset are enumerated lexicographically too.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "beqtest/core.hpp"

namespace beq {

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw Error(ErrorKind::Overflow, "combination count exceeds 64 bits");
  return a * b;
}

inline std::uint64_t checked_pow(std::uint64_t base, std::size_t exponent) {
  std::uint64_t r = 1;
  for (std::size_t k = 0; k < exponent; ++k) r = checked_mul(r, base);
  return r;
}

}  // namespace detail

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i at every step.
    r = detail::checked_mul(r, n - k + i) / i;
  }
  return r;
}

struct CombinationCount {
  std::uint64_t exact = 0;
  std::uint64_t lower_bound = 0;  // (min |C_i|)^m
};

inline CombinationCount full_combination_count(const Categorization& cat) {
  if (cat.empty()) throw Error(ErrorKind::InvalidCategorization, "no categories");
  auto counts = cat.element_counts();
  CombinationCount out{1, 0};
  for (auto c : counts) out.exact = detail::checked_mul(out.exact, c);
  out.lower_bound = detail::checked_pow(*std::min_element(counts.begin(), counts.end()), counts.size());
  return out;
}

/// C(m, gamma) * S^gamma with S the largest category.
inline std::uint64_t tuple_bound(const Categorization& cat, std::size_t gamma) {
  auto counts = cat.element_counts();
  if (gamma < 1 || gamma > counts.size())
    throw Error(ErrorKind::GammaOutOfRange, "gamma=" + std::to_string(gamma) + " with m=" +
                                                std::to_string(counts.size()));
  return detail::checked_mul(binomial(counts.size(), gamma),
                             detail::checked_pow(*std::max_element(counts.begin(), counts.end()), gamma));
}

/// Worst-case number of additional cases needed to restore full gamma-way
/// coverage once a refinement adds one element: C(m, gamma-1) * S^gamma.
inline std::uint64_t recovery_bound(const Categorization& cat, std::size_t gamma) {
  auto counts = cat.element_counts();
  if (gamma < 2 || gamma > counts.size())
    throw Error(ErrorKind::GammaOutOfRange, "gamma=" + std::to_string(gamma) + " with m=" +
                                                std::to_string(counts.size()) + " (need 2 <= gamma <= m)");
  return detail::checked_mul(binomial(counts.size(), gamma - 1),
                             detail::checked_pow(*std::max_element(counts.begin(), counts.end()), gamma));
}

/// One (category subset, element tuple) combination; categories 0-based,
/// elements 1-based.
struct Combination {
  std::vector<std::size_t> categories;
  std::vector<std::size_t> elements;

  bool operator==(const Combination&) const = default;
  auto operator<=>(const Combination&) const = default;
};

struct CoverageReport {
  std::size_t gamma = 0;
  std::uint64_t total_combinations = 0;
  std::uint64_t covered = 0;
  double ratio = 0.0;
  std::uint64_t tuple_bound = 0;
  std::vector<Combination> uncovered;
  std::vector<std::string> warnings;

  bool full() const { return covered == total_combinations; }
};

/// Enumeration size above which gamma_coverage attaches a warning.
inline constexpr std::uint64_t kCoverageWarnLimit = 10'000'000;

namespace detail {

// Calls fn(subset) for every gamma-subset of {0..m-1} in lexicographic order.
template <class Fn>
void for_each_subset(std::size_t m, std::size_t gamma, Fn&& fn) {
  std::vector<std::size_t> subset(gamma);
  for (std::size_t k = 0; k < gamma; ++k) subset[k] = k;
  while (true) {
    fn(std::as_const(subset));
    std::size_t k = gamma;
    while (k > 0 && subset[k - 1] == m - gamma + (k - 1)) --k;
    if (k == 0) return;
    ++subset[k - 1];
    for (std::size_t t = k; t < gamma; ++t) subset[t] = subset[t - 1] + 1;
  }
}

}  // namespace detail

inline CoverageReport gamma_coverage_of_signatures(std::span<const CellSignature> sigs, const Categorization& cat,
                                                   std::size_t gamma) {
  const auto counts = cat.element_counts();
  const std::size_t m = counts.size();
  if (gamma < 1 || gamma > m)
    throw Error(ErrorKind::GammaOutOfRange, "gamma=" + std::to_string(gamma) + " with m=" + std::to_string(m));

  CoverageReport report;
  report.gamma = gamma;
  report.tuple_bound = tuple_bound(cat, gamma);
  if (report.tuple_bound > kCoverageWarnLimit)
    report.warnings.push_back("enumeration bound " + std::to_string(report.tuple_bound) + " exceeds " +
                              std::to_string(kCoverageWarnLimit));

  detail::for_each_subset(m, gamma, [&](const std::vector<std::size_t>& subset) {
    // Mixed-radix code of the projected tuple (elements are 1-based).
    std::uint64_t tuples = 1;
    for (auto c : subset) tuples = detail::checked_mul(tuples, counts[c]);
    std::vector<bool> hit(tuples, false);
    for (const auto& sig : sigs) {
      std::uint64_t code = 0;
      for (auto c : subset) code = code * counts[c] + (sig.elements[c] - 1);
      hit[code] = true;
    }
    report.total_combinations += tuples;
    for (std::uint64_t code = 0; code < tuples; ++code) {
      if (hit[code]) {
        ++report.covered;
        continue;
      }
      Combination combo{subset, std::vector<std::size_t>(gamma)};
      std::uint64_t rest = code;
      for (std::size_t k = gamma; k-- > 0;) {
        combo.elements[k] = rest % counts[subset[k]] + 1;
        rest /= counts[subset[k]];
      }
      report.uncovered.push_back(std::move(combo));
    }
  });
  report.ratio = report.total_combinations == 0
                     ? 1.0
                     : static_cast<double>(report.covered) / static_cast<double>(report.total_combinations);
  return report;
}

inline CoverageReport gamma_coverage(std::span<const TestCase> cases, const Categorization& cat, std::size_t gamma) {
  std::vector<CellSignature> sigs;
  sigs.reserve(cases.size());
  for (const auto& c : cases) sigs.push_back(signature_of(cat, c.x));
  return gamma_coverage_of_signatures(sigs, cat, gamma);
}

/// Uncovered combinations that fix category `category` at element `element`.
inline std::vector<Combination> missing_for_new_element(std::span<const TestCase> cases, const Categorization& cat,
                                                        std::size_t gamma, std::size_t category,
                                                        std::size_t element) {
  if (category >= cat.size() || element < 1 || element > element_count(cat[category]))
    throw Error(ErrorKind::UnknownElement, "category " + std::to_string(category) + " element " +
                                               std::to_string(element));
  CoverageReport report = gamma_coverage(cases, cat, gamma);
  std::vector<Combination> out;
  for (auto& combo : report.uncovered) {
    auto it = std::find(combo.categories.begin(), combo.categories.end(), category);
    if (it == combo.categories.end()) continue;
    if (combo.elements[static_cast<std::size_t>(it - combo.categories.begin())] == element)
      out.push_back(std::move(combo));
  }
  return out;
}

}  // namespace beq
