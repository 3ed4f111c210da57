#pragma once

// Streaming construction of a believed-equivalence categorization: every
// incoming case is checked against the processed set and, on a conflict,
// its cell is cut along one input dimension until the conflict disappears.

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "beqtest/ledger.hpp"
#include "beqtest/refinement.hpp"

namespace beq {

enum class EventAction { Accepted, Cut, Expanded, Warning };

inline const char* to_string(EventAction a) {
  switch (a) {
    case EventAction::Accepted: return "accepted";
    case EventAction::Cut: return "cut";
    case EventAction::Expanded: return "expanded";
    case EventAction::Warning: return "warning";
  }
  return "?";
}

struct BuildEvent {
  std::string case_id;
  EventAction action = EventAction::Accepted;
  std::optional<std::size_t> category;
  std::optional<double> beta;
  std::optional<double> margin;
  std::uint64_t revision = 0;
  std::string method;  // "probe" or "max_margin" for cuts, message for warnings
};

/// Checkpoints at which trend rows are taken: the listed counts, then every
/// `every` cases after the last of them (0 disables the repetition).
struct CheckpointPlan {
  std::vector<std::size_t> explicit_points{0, 1000, 5000, 10000};
  std::size_t every = 10000;

  bool contains(std::size_t n) const {
    if (std::find(explicit_points.begin(), explicit_points.end(), n) != explicit_points.end()) return true;
    const std::size_t last = explicit_points.empty() ? 0 : explicit_points.back();
    return every > 0 && n > last && (n - last) % every == 0;
  }
};

struct TrendRow {
  std::size_t cases = 0;
  std::vector<std::size_t> elements;  // per category; 1 before any cut
};

struct BuildWarning {
  std::string case_id;
  std::string message;
};

struct LazyBuildResult {
  Categorization categorization;
  EquivalenceLedger ledger;
  std::vector<TestCase> processed;
  std::vector<BuildEvent> events;
  std::vector<TrendRow> trend;
  std::optional<BuildWarning> warning;
  std::size_t cuts = 0;
};

namespace detail {

inline TrendRow trend_row(std::size_t n, const Categorization& cat) { return TrendRow{n, cat.element_counts()}; }

}  // namespace detail

/// Processes `stream` in order. Conflicts are resolved by trying, for each
/// category in the configured order, the probe-derived cut and then the
/// max-margin cut; the first proposal that keeps both new intervals wider
/// than eta, stays at least eta away from every coordinate in the cell and
/// separates the new case from at least one conflicting witness is applied.
/// The scan repeats until the new case is no longer inconsistent. When no
/// category admits a cut, the partial state is returned with a warning.
template <PointEvaluator EvalAt>
LazyBuildResult lazy_build(std::span<const TestCase> stream, std::span<const Bound> bounds, const EvalAt& eval_at,
                           const RefinementConfig& config, const CheckpointPlan& checkpoints = {}) {
  config.validate();
  LazyBuildResult out;
  out.categorization = initialize_from_bounds(bounds);
  out.ledger = EquivalenceLedger(out.categorization.revision());
  const auto order = config.order_for(out.categorization.size());
  std::unordered_map<std::string, std::size_t> index_of;

  if (checkpoints.contains(0)) out.trend.push_back(detail::trend_row(0, out.categorization));

  for (const TestCase& incoming : stream) {
    require_in_bounds(incoming.x, bounds);
    if (index_of.contains(incoming.id)) throw Error(ErrorKind::ParseError, "duplicate case id '" + incoming.id + "'");
    std::optional<std::vector<ProbeResult>> probes;

    while (true) {
      const Classification verdict = classify(incoming, out.ledger, out.categorization);
      if (verdict.kind != Consistency::Inconsistent) break;

      const CellRecord& cell = *out.ledger.find(verdict.cell);
      std::vector<const TestCase*> conflicting;
      for (const auto& id : cell.witnesses) conflicting.push_back(&out.processed[index_of.at(id)]);

      auto warn = [&](std::string message) {
        out.warning = BuildWarning{incoming.id, message};
        out.trend.push_back(detail::trend_row(out.processed.size(), out.categorization));
        out.events.push_back(BuildEvent{incoming.id, EventAction::Warning, std::nullopt, std::nullopt, std::nullopt,
                                        out.categorization.revision(), std::move(message)});
      };

      if (std::any_of(conflicting.begin(), conflicting.end(), [&](const TestCase* w) { return w->x == incoming.x; })) {
        warn("identical input already processed with a different evaluation");
        return out;
      }
      if (!probes) probes = knn_probe(out.processed, incoming, config, bounds, eval_at);

      std::optional<CutProposal> chosen;
      std::string method;
      for (std::size_t category : order) {
        const auto* part = out.categorization.partition(category);
        if (!part || part->element_count() > config.max_cuts_per_category) continue;
        const std::size_t dim = part->dimension();
        const double here = incoming.x[dim];

        auto admissible = [&](const CutProposal& p) {
          const auto [a, b] = part->element_interval(p.element);
          if (!(p.beta - a > config.eta && b - p.beta > config.eta)) return false;
          if (std::abs(p.beta - here) < config.eta) return false;
          bool separates = false;
          for (const TestCase* w : conflicting) {
            if (std::abs(p.beta - w->x[dim]) < config.eta) return false;
            separates = separates || ((w->x[dim] <= p.beta) != (here <= p.beta));
          }
          return separates;
        };

        try {
          CutProposal p = suggest_cut_from_probes(*probes, incoming, out.categorization, category);
          if (admissible(p)) {
            chosen = p;
            method = "probe";
            break;
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NoFlipObserved && e.kind() != ErrorKind::DegenerateCut) throw;
        }
        try {
          CutProposal p = max_margin_cut(out.processed, out.categorization, incoming, category, config.eta);
          if (admissible(p)) {
            chosen = p;
            method = "max_margin";
            break;
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NotSeparable && e.kind() != ErrorKind::MarginTooSmall) throw;
        }
      }

      if (!chosen) {
        warn("no category admits a cut wider than eta");
        return out;
      }
      out.categorization = apply_cut(out.categorization, *chosen);
      out.ledger = rebuild(out.processed, out.categorization);
      ++out.cuts;
      out.events.push_back(BuildEvent{incoming.id, EventAction::Cut, chosen->category, chosen->beta, chosen->margin,
                                      out.categorization.revision(), method});
    }

    out.ledger = insert_consistent(incoming, std::move(out.ledger), out.categorization);
    index_of.emplace(incoming.id, out.processed.size());
    out.processed.push_back(incoming);
    out.events.push_back(BuildEvent{incoming.id, EventAction::Accepted, std::nullopt, std::nullopt, std::nullopt,
                                    out.categorization.revision(), {}});
    if (checkpoints.contains(out.processed.size()))
      out.trend.push_back(detail::trend_row(out.processed.size(), out.categorization));
  }
  if (out.trend.empty() || out.trend.back().cases != out.processed.size())
    out.trend.push_back(detail::trend_row(out.processed.size(), out.categorization));
  return out;
}

}  // namespace beq
