#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "beqtest/evaluator.hpp"
#include "beqtest/relu_network.hpp"

namespace beq {

/// A network paired with the evaluation function applied to its outputs.
struct ModuleUnderTest {
  ReluNetwork net;
  Evaluator evaluator;

  const std::vector<Bound>& input_bounds() const { return net.input_bounds(); }

  /// Builds a test case; output and evaluation value are always computed
  /// here, never taken from the caller.
  TestCase make_case(std::string id, std::vector<double> x, std::optional<std::int64_t> label = std::nullopt,
                     const Categorization* cat = nullptr) const {
    TestCase c;
    c.id = std::move(id);
    c.output = infer(net, x);
    c.x = std::move(x);
    c.label = label;
    c.eval = evaluate(evaluator, c.x, c.output, c.label, cat);
    return c;
  }

  EvalValue eval_at(std::span<const double> x, const Categorization* cat = nullptr) const {
    auto y = net.forward(x);
    return evaluate(evaluator, x, y, std::nullopt, cat);
  }
};

}  // namespace beq
