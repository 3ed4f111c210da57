#pragma once

// Evaluation functions mapping (input, output) pairs to discrete values.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "beqtest/core.hpp"

namespace beq {

/// Buckets one output coordinate by ascending thresholds t_0 < ... < t_n
/// into classes 0..n-1. Buckets are [t_k, t_{k+1}) except the last, which is
/// closed. Values below t_0 fall into class 0 and values above t_n into the
/// last class.
struct OutputBucket {
  std::vector<double> thresholds;
  std::size_t output_index = 0;

  std::size_t class_count() const { return thresholds.size() - 1; }

  std::int64_t class_of(double y) const {
    const std::size_t n = class_count();
    for (std::size_t k = 1; k < n; ++k) {
      if (y < thresholds[k]) return static_cast<std::int64_t>(k - 1);
    }
    return static_cast<std::int64_t>(n - 1);
  }

  /// Closed interval of outputs belonging to `cls`, ignoring the clamping of
  /// out-of-range values.
  std::pair<double, double> class_range(std::int64_t cls) const {
    const auto k = static_cast<std::size_t>(cls);
    return {thresholds.at(k), thresholds.at(k + 1)};
  }

  static OutputBucket uniform(double lo, double hi, std::size_t classes, std::size_t output_index = 0) {
    OutputBucket b;
    b.output_index = output_index;
    for (std::size_t k = 0; k <= classes; ++k)
      b.thresholds.push_back(k == classes ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(classes));
    return b;
  }
};

/// 1 when the thresholded prediction on `output_index` agrees with the
/// case's ground-truth label, 0 otherwise.
struct LabelMatch {
  std::size_t output_index = 0;
  double decision_threshold = 0.5;
};

/// Element-index tuple of the input; independent of the module's output.
struct CellIdentity {};

using Evaluator = std::variant<OutputBucket, LabelMatch, CellIdentity>;

inline void validate(const Evaluator& evaluator) {
  if (const auto* b = std::get_if<OutputBucket>(&evaluator)) {
    if (b->thresholds.size() < 2)
      throw Error(ErrorKind::InvalidConfig, "bucket evaluator needs at least two thresholds");
    for (std::size_t k = 1; k < b->thresholds.size(); ++k) {
      if (!(b->thresholds[k - 1] < b->thresholds[k]))
        throw Error(ErrorKind::InvalidConfig, "bucket thresholds must be strictly ascending");
    }
  }
}

inline EvalValue evaluate(const Evaluator& evaluator, std::span<const double> x, std::span<const double> output,
                          std::optional<std::int64_t> label = std::nullopt, const Categorization* cat = nullptr) {
  if (const auto* b = std::get_if<OutputBucket>(&evaluator)) {
    if (b->output_index >= output.size())
      throw Error(ErrorKind::DimensionMismatch, "bucket reads output " + std::to_string(b->output_index) + " of " +
                                                    std::to_string(output.size()));
    return EvalValue(b->class_of(output[b->output_index]));
  }
  if (const auto* lm = std::get_if<LabelMatch>(&evaluator)) {
    if (!label) throw Error(ErrorKind::MissingLabel, "label-match evaluation without ground truth");
    if (lm->output_index >= output.size())
      throw Error(ErrorKind::DimensionMismatch, "label match reads output " + std::to_string(lm->output_index));
    const std::int64_t predicted = output[lm->output_index] >= lm->decision_threshold ? 1 : 0;
    return EvalValue(predicted == *label ? 1 : 0);
  }
  if (!cat) throw Error(ErrorKind::InvalidConfig, "cell-identity evaluation needs a categorization");
  CellSignature sig = signature_of(*cat, x);
  return EvalValue(std::vector<std::int64_t>(sig.elements.begin(), sig.elements.end()));
}

inline bool is_linear(const Evaluator& evaluator) { return std::holds_alternative<OutputBucket>(evaluator); }

}  // namespace beq
