#pragma once

// Refinement of categorizations: axis-aligned cuts, expansion by a fresh
// predicate category, max-margin cut placement and cut proposals from
// directional probing toward nearest neighbours.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "beqtest/core.hpp"
#include "beqtest/ledger.hpp"

namespace beq {

struct CutProposal {
  std::size_t category = 0;
  std::size_t element = 1;
  double beta = 0.0;
  double margin = 0.0;
};

struct RefinementConfig {
  double eta = 1e-3;     // minimum interval width and witness margin
  std::size_t k = 3;     // neighbours probed
  double delta = 0.01;   // probe step
  std::vector<std::size_t> dimension_order;  // category search order; empty = 0..m-1
  std::size_t max_cuts_per_category = 10'000;

  void validate() const {
    if (!(eta > 0.0)) throw Error(ErrorKind::InvalidConfig, "eta must be positive");
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidConfig, "delta must be positive");
    if (k < 1) throw Error(ErrorKind::InvalidConfig, "k must be at least 1");
  }

  std::vector<std::size_t> order_for(std::size_t m) const {
    std::vector<std::size_t> order = dimension_order;
    if (order.empty()) {
      order.resize(m);
      std::iota(order.begin(), order.end(), std::size_t{0});
    }
    std::vector<std::size_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != i || sorted.size() != m)
        throw Error(ErrorKind::InvalidConfig, "dimension_order must be a permutation of the categories");
    }
    return order;
  }
};

inline Categorization apply_cut(const Categorization& cat, const CutProposal& proposal) {
  if (proposal.category >= cat.size())
    throw Error(ErrorKind::InvalidCut, "no category " + std::to_string(proposal.category));
  const auto* part = cat.partition(proposal.category);
  if (!part) throw Error(ErrorKind::InvalidCut, "category " + std::to_string(proposal.category) + " is not a partition");
  return cat.with_category(proposal.category, part->with_cut(proposal.element, proposal.beta));
}

inline bool is_effective(const Categorization& cat_after_cut, std::span<const TestCase> cases,
                         const TestCase& candidate) {
  std::vector<TestCase> all(cases.begin(), cases.end());
  all.push_back(candidate);
  return check_believed_equivalence(all, cat_after_cut).holds;
}

/// Adds the category {not p, p}. `p` must hold on `candidate` and on no
/// existing case.
inline Categorization expand(const Categorization& cat, const TestCase& candidate, std::span<const TestCase> cases,
                             const Predicate& predicate) {
  if (!predicate.test(candidate.x))
    throw Error(ErrorKind::PredicateMisclassifies, "predicate '" + predicate.name + "' is false on '" + candidate.id + "'");
  for (const auto& c : cases) {
    if (predicate.test(c.x))
      throw Error(ErrorKind::PredicateMisclassifies, "predicate '" + predicate.name + "' holds on witness '" + c.id + "'");
  }
  return cat.with_appended(
      PredicateCategory::expansion("expansion_" + std::to_string(cat.revision() + 1), predicate));
}

/// Ball around `candidate` with radius half its L-infinity distance to the
/// closest existing case.
inline Predicate default_expansion_predicate(const TestCase& candidate, std::span<const TestCase> cases) {
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& c : cases) {
    double d = 0.0;
    for (std::size_t i = 0; i < c.x.size(); ++i) d = std::max(d, std::abs(c.x[i] - candidate.x[i]));
    nearest = std::min(nearest, d);
  }
  if (nearest == 0.0)
    throw Error(ErrorKind::PredicateMisclassifies, "an existing case coincides with '" + candidate.id + "'");
  const double radius = std::isfinite(nearest) ? nearest / 2.0 : 1.0;
  return Predicate::within_ball(LinfBall{candidate.x, radius}, "near_" + candidate.id);
}

namespace detail {

struct AxisPoint {
  double coord;
  const EvalValue* value;
};

inline bool homogeneous(std::span<const AxisPoint> points) {
  return std::all_of(points.begin(), points.end(),
                     [&](const AxisPoint& p) { return *p.value == *points.front().value; });
}

// Coordinates along `dimension` of the cases sharing the candidate's cell,
// followed by the candidate itself.
inline std::vector<AxisPoint> cell_points(std::span<const TestCase> cases, const Categorization& cat,
                                          const TestCase& candidate, const CellSignature& cell, std::size_t dimension) {
  std::vector<AxisPoint> pts;
  for (const auto& c : cases) {
    if (signature_of(cat, c.x) == cell) pts.push_back({c.x[dimension], &c.eval});
  }
  pts.push_back({candidate.x[dimension], &candidate.eval});
  std::stable_sort(pts.begin(), pts.end(), [](const AxisPoint& a, const AxisPoint& b) { return a.coord < b.coord; });
  return pts;
}

}  // namespace detail

/// Widest-margin single cut on category `category` separating the
/// candidate's cell so that both halves agree on their evaluation values.
/// The cut sits at the midpoint of the chosen gap; ties go to the smaller
/// cut location.
inline CutProposal max_margin_cut(std::span<const TestCase> cases, const Categorization& cat,
                                  const TestCase& candidate, std::size_t category, double eta) {
  if (category >= cat.size() || !cat.partition(category))
    throw Error(ErrorKind::InvalidCut, "category " + std::to_string(category) + " is not a partition");
  const auto& part = *cat.partition(category);
  const CellSignature cell = signature_of(cat, candidate.x);
  const auto pts = detail::cell_points(cases, cat, candidate, cell, part.dimension());

  bool found = false;
  CutProposal best{category, cell.elements[category], 0.0, -1.0};
  for (std::size_t split = 1; split < pts.size(); ++split) {
    const double lo = pts[split - 1].coord;
    const double hi = pts[split].coord;
    if (!(lo < hi)) continue;
    const std::span<const detail::AxisPoint> all(pts);
    if (!detail::homogeneous(all.first(split)) || !detail::homogeneous(all.subspan(split))) continue;
    const double beta = lo + (hi - lo) / 2.0;
    const double margin = std::min(beta - lo, hi - beta);
    if (!found || margin > best.margin) {
      best.beta = beta;
      best.margin = margin;
      found = true;
    }
  }
  if (!found)
    throw Error(ErrorKind::NotSeparable, "no single cut on category " + std::to_string(category) +
                                             " separates '" + candidate.id + "'");
  if (best.margin < eta)
    throw Error(ErrorKind::MarginTooSmall, "best margin " + format_double(best.margin) + " below eta " +
                                               format_double(eta));
  return best;
}

struct ProbeResult {
  std::string neighbor_id;
  std::vector<double> direction;
  std::size_t steps_taken = 0;
  double distance_to_flip = std::numeric_limits<double>::infinity();
  std::vector<double> flip_point;  // empty unless a flip was observed
  bool truncated = false;          // probe left the input bounds before flipping

  bool flipped() const { return std::isfinite(distance_to_flip); }
};

template <class F>
concept PointEvaluator = requires(const F& f, std::span<const double> x) {
  { f(x) } -> std::convertible_to<EvalValue>;
};

/// Walks from the candidate toward each of its k nearest cases in steps of
/// `delta`, stopping at the first point whose evaluation differs from the
/// candidate's, or at the first step that reaches or passes the neighbour.
/// Results are ordered by neighbour id.
template <PointEvaluator EvalAt>
std::vector<ProbeResult> knn_probe(std::span<const TestCase> cases, const TestCase& candidate,
                                   const RefinementConfig& config, std::span<const Bound> bounds,
                                   const EvalAt& eval_at) {
  config.validate();
  if (cases.empty()) throw Error(ErrorKind::InvalidConfig, "probing needs at least one existing case");

  std::vector<std::pair<double, std::size_t>> by_distance;
  by_distance.reserve(cases.size());
  for (std::size_t n = 0; n < cases.size(); ++n) {
    double sq = 0.0;
    for (std::size_t i = 0; i < candidate.x.size(); ++i) {
      const double d = cases[n].x[i] - candidate.x[i];
      sq += d * d;
    }
    by_distance.emplace_back(sq, n);
  }
  const std::size_t k = std::min(config.k, cases.size());
  std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k), by_distance.end());
  by_distance.resize(k);

  std::vector<ProbeResult> results;
  for (const auto& [sq, n] : by_distance) {
    const TestCase& neighbor = cases[n];
    ProbeResult r;
    r.neighbor_id = neighbor.id;
    const double dist = std::sqrt(sq);
    r.direction.assign(candidate.x.size(), 0.0);
    if (dist == 0.0) {
      results.push_back(std::move(r));
      continue;
    }
    for (std::size_t i = 0; i < candidate.x.size(); ++i) r.direction[i] = (neighbor.x[i] - candidate.x[i]) / dist;

    std::vector<double> point(candidate.x.size());
    const auto max_steps = static_cast<std::size_t>(std::ceil(dist / config.delta)) + 1;
    for (std::size_t s = 1; s <= max_steps; ++s) {
      const double t = static_cast<double>(s) * config.delta;
      bool inside = true;
      for (std::size_t i = 0; i < point.size(); ++i) {
        point[i] = candidate.x[i] + t * r.direction[i];
        inside = inside && bounds[i].contains(point[i]);
      }
      r.steps_taken = s;
      if (!inside) {
        r.truncated = true;
        break;
      }
      if (!(eval_at(std::span<const double>(point)) == candidate.eval)) {
        r.distance_to_flip = t;
        r.flip_point = point;
        break;
      }
      if (t >= dist) break;
    }
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(),
            [](const ProbeResult& a, const ProbeResult& b) { return a.neighbor_id < b.neighbor_id; });
  return results;
}

/// Cut halfway between the candidate and the nearest observed flip, measured
/// along the partition's coordinate. A midpoint outside the candidate's
/// element is pulled back to halfway between the candidate and the crossed
/// element boundary.
inline CutProposal suggest_cut_from_probes(std::span<const ProbeResult> probes, const TestCase& candidate,
                                           const Categorization& cat, std::size_t category) {
  const ProbeResult* nearest = nullptr;
  for (const auto& p : probes) {
    if (p.flipped() && (!nearest || p.distance_to_flip < nearest->distance_to_flip)) nearest = &p;
  }
  if (!nearest) throw Error(ErrorKind::NoFlipObserved, "no probe changed the evaluation of '" + candidate.id + "'");
  if (category >= cat.size() || !cat.partition(category))
    throw Error(ErrorKind::InvalidCut, "category " + std::to_string(category) + " is not a partition");

  const auto& part = *cat.partition(category);
  const std::size_t dim = part.dimension();
  const std::size_t element = part.element_of(candidate.x[dim]);
  const auto [a, b] = part.element_interval(element);
  const double origin = candidate.x[dim];
  const double flip = nearest->flip_point[dim];
  if (flip == origin)
    throw Error(ErrorKind::DegenerateCut, "flip does not move along x" + std::to_string(dim + 1));

  double beta = origin + (flip - origin) / 2.0;
  if (beta >= b) beta = origin + (b - origin) / 2.0;
  if (beta <= a) beta = origin + (a - origin) / 2.0;
  if (!(beta > a && beta < b) || beta == origin)
    throw Error(ErrorKind::DegenerateCut, "no room for a cut between x" + std::to_string(dim + 1) + "=" +
                                              format_double(origin) + " and its element boundary");
  return CutProposal{category, element, beta, std::abs(beta - origin)};
}

}  // namespace beq
