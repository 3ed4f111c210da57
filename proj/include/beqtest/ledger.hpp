#pragma once

// Believed-equivalence bookkeeping over an evolving test set.
//
// A ledger maps every occupied cell to the evaluation value shared by its
// witnesses. The canonical value of a cell is the value of its first
// witness; insertion order is therefore significant for reports.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "beqtest/core.hpp"

namespace beq {

struct CellRecord {
  EvalValue value;
  std::vector<std::string> witnesses;
};

struct Violation {
  CellSignature cell;
  EvalValue existing_value;
  EvalValue new_value;
  std::string conflicting_witness;
  std::string offender;

  bool operator==(const Violation&) const = default;
};

class EquivalenceLedger {
 public:
  EquivalenceLedger() = default;
  explicit EquivalenceLedger(std::uint64_t revision) : revision_(revision) {}

  std::uint64_t revision() const { return revision_; }
  const std::map<CellSignature, CellRecord>& cells() const { return cells_; }
  std::size_t cell_count() const { return cells_.size(); }

  std::size_t witness_count() const {
    std::size_t n = 0;
    for (const auto& [sig, rec] : cells_) n += rec.witnesses.size();
    return n;
  }

  const CellRecord* find(const CellSignature& sig) const {
    auto it = cells_.find(sig);
    return it == cells_.end() ? nullptr : &it->second;
  }

 private:
  friend EquivalenceLedger insert_unchecked(EquivalenceLedger, const CellSignature&, const TestCase&);

  std::uint64_t revision_ = 0;
  std::map<CellSignature, CellRecord> cells_;
};

inline EquivalenceLedger insert_unchecked(EquivalenceLedger ledger, const CellSignature& sig, const TestCase& c) {
  auto [it, fresh] = ledger.cells_.try_emplace(sig);
  if (fresh) it->second.value = c.eval;
  it->second.witnesses.push_back(c.id);
  return ledger;
}

struct EquivalenceCheck {
  bool holds = true;
  std::vector<Violation> violations;
};

/// Scans `cases` in order; a cell's reference value is that of its first
/// case. One violation is reported per (cell, differing value) pair, ordered
/// by offender id.
inline EquivalenceCheck check_believed_equivalence(std::span<const TestCase> cases, const Categorization& cat) {
  struct FirstSeen {
    const TestCase* first;
    std::set<EvalValue> reported;
  };
  std::map<CellSignature, FirstSeen> seen;
  EquivalenceCheck result;
  for (const auto& c : cases) {
    CellSignature sig = signature_of(cat, c.x);
    auto [it, fresh] = seen.try_emplace(std::move(sig), FirstSeen{&c, {}});
    if (fresh) continue;
    FirstSeen& cell = it->second;
    if (cell.first->eval == c.eval || cell.reported.contains(c.eval)) continue;
    cell.reported.insert(c.eval);
    result.violations.push_back(Violation{it->first, cell.first->eval, c.eval, cell.first->id, c.id});
  }
  std::stable_sort(result.violations.begin(), result.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.offender < b.offender; });
  result.holds = result.violations.empty();
  return result;
}

enum class Consistency { Consistent, Inconsistent, NewCell };

inline const char* to_string(Consistency c) {
  switch (c) {
    case Consistency::Consistent: return "Consistent";
    case Consistency::Inconsistent: return "Inconsistent";
    case Consistency::NewCell: return "NewCell";
  }
  return "?";
}

struct Classification {
  Consistency kind = Consistency::NewCell;
  CellSignature cell;
  std::optional<Violation> violation;
};

inline Classification classify(const TestCase& candidate, const EquivalenceLedger& ledger, const Categorization& cat) {
  if (ledger.revision() != cat.revision())
    throw Error(ErrorKind::RevisionMismatch, "ledger at revision " + std::to_string(ledger.revision()) +
                                                 ", categorization at " + std::to_string(cat.revision()));
  Classification out;
  out.cell = signature_of(cat, candidate.x);
  const CellRecord* rec = ledger.find(out.cell);
  if (!rec) {
    out.kind = Consistency::NewCell;
  } else if (rec->value == candidate.eval) {
    out.kind = Consistency::Consistent;
  } else {
    out.kind = Consistency::Inconsistent;
    out.violation = Violation{out.cell, rec->value, candidate.eval, rec->witnesses.front(), candidate.id};
  }
  return out;
}

inline EquivalenceLedger insert_consistent(const TestCase& candidate, EquivalenceLedger ledger,
                                           const Categorization& cat) {
  Classification verdict = classify(candidate, ledger, cat);
  if (verdict.kind == Consistency::Inconsistent)
    throw Error(ErrorKind::WouldViolate, "case '" + candidate.id + "' conflicts with witness '" +
                                             verdict.violation->conflicting_witness + "' in cell " +
                                             verdict.cell.to_string());
  return insert_unchecked(std::move(ledger), verdict.cell, candidate);
}

class StillInconsistent : public Error {
 public:
  explicit StillInconsistent(std::vector<Violation> violations)
      : Error(ErrorKind::StillInconsistent, std::to_string(violations.size()) + " violation(s) remain"),
        violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

inline EquivalenceLedger rebuild(std::span<const TestCase> cases, const Categorization& cat) {
  EquivalenceLedger ledger(cat.revision());
  std::vector<Violation> violations;
  for (const auto& c : cases) {
    CellSignature sig = signature_of(cat, c.x);
    const CellRecord* rec = ledger.find(sig);
    if (rec && rec->value != c.eval) {
      violations.push_back(Violation{sig, rec->value, c.eval, rec->witnesses.front(), c.id});
      continue;
    }
    ledger = insert_unchecked(std::move(ledger), sig, c);
  }
  if (!violations.empty()) {
    // Report in the same shape as check_believed_equivalence.
    throw StillInconsistent(check_believed_equivalence(cases, cat).violations);
  }
  return ledger;
}

}  // namespace beq
