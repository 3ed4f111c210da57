#pragma once

// Grid search for robustness counterexamples inside axis-aligned balls.
// A returned point is a genuine counterexample; finding none proves nothing
// about points between grid nodes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "beqtest/core.hpp"
#include "beqtest/refinement.hpp"

namespace beq {

inline constexpr std::uint64_t kDefaultGridCap = 10'000'000;

/// Coordinates center + k * step with |k * step| <= radius, restricted to
/// `bound`, in ascending order.
inline std::vector<double> grid_axis(double center, double radius, double step, const Bound& bound) {
  auto reach = static_cast<long long>(std::floor(radius / step));
  while (reach > 0 && static_cast<double>(reach) * step > radius) --reach;
  while (static_cast<double>(reach + 1) * step <= radius) ++reach;
  std::vector<double> axis;
  for (long long k = -reach; k <= reach; ++k) {
    const double v = center + static_cast<double>(k) * step;
    if (bound.contains(v)) axis.push_back(v);
  }
  return axis;
}

/// Lexicographically smallest grid point (pitch `step`, centred on `center`)
/// inside the radius ball and the input bounds whose evaluation differs from
/// `reference`.
template <PointEvaluator EvalAt>
std::optional<std::vector<double>> robustness_falsify(const EvalAt& eval_at, std::span<const Bound> bounds,
                                                      std::span<const double> center, const EvalValue& reference,
                                                      double radius, double step,
                                                      std::uint64_t cap = kDefaultGridCap) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidConfig, "grid step must be positive");
  if (!(radius >= 0.0)) throw Error(ErrorKind::InvalidConfig, "radius must be non-negative");
  std::vector<std::vector<double>> axes;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < center.size(); ++i) {
    axes.push_back(grid_axis(center[i], radius, step, bounds[i]));
    if (axes.back().empty()) return std::nullopt;
    if (axes.back().size() > cap / total)
      throw Error(ErrorKind::GridTooLarge, "grid exceeds " + std::to_string(cap) + " points");
    total *= axes.back().size();
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<double> point(axes.size());
  while (true) {
    for (std::size_t i = 0; i < axes.size(); ++i) point[i] = axes[i][idx[i]];
    if (!(eval_at(std::span<const double>(point)) == reference)) return point;
    std::size_t d = axes.size();
    while (d > 0) {
      --d;
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
      if (d == 0) return std::nullopt;
    }
    if (axes.empty()) return std::nullopt;
  }
}

/// Bisects the radius over [0, largest input range] with the grid falsifier
/// as oracle; returns the largest radius found free of counterexamples,
/// accurate to `tolerance`.
template <PointEvaluator EvalAt>
double max_radius_estimate(const EvalAt& eval_at, std::span<const Bound> bounds, std::span<const double> center,
                           const EvalValue& reference, double step, double tolerance,
                           std::uint64_t cap = kDefaultGridCap) {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidConfig, "tolerance must be positive");
  double hi = 0.0;
  for (const auto& b : bounds) hi = std::max(hi, b.width());
  auto clean = [&](double r) { return !robustness_falsify(eval_at, bounds, center, reference, r, step, cap); };
  if (clean(hi)) return hi;
  double lo = 0.0;
  while (hi - lo > tolerance) {
    const double mid = lo + (hi - lo) / 2.0;
    (clean(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace beq
