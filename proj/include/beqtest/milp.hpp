#pragma once

// Mixed-integer linear encoding of optimal cut placement for a ReLU network
// under a bucket evaluator, written in CPLEX LP text format.
//
// One instance is emitted per candidate gap between consecutive sorted
// coordinates of the new case's cell; inside a gap the side of every
// coordinate relative to the cut is known, so the distance constraints are
// linear and the only integer variables are the ReLU phase indicators.
// A separate falsification instance asks for an input in the radius-r ball
// whose output leaves the new case's bucket: robustness at radius r holds
// iff that instance is infeasible.
//
// Variable names: z_i (symbolic input, 1-based), pre_l_n / post_l_n / d_l_n
// (pre-activation, post-activation and phase of neuron n in layer l, both
// 1-based; the output layer only has pre_L_n), beta (cut), eps (margin).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "beqtest/core.hpp"
#include "beqtest/evaluator.hpp"
#include "beqtest/relu_network.hpp"

namespace beq {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Interval-arithmetic pre-activation bounds for every neuron of every layer
/// (output layer included), starting from the closed input box.
inline std::vector<std::vector<Interval>> relu_bigM_bounds(const ReluNetwork& net) {
  std::vector<Interval> current;
  for (const auto& b : net.input_bounds()) current.push_back({b.lower, b.upper});
  std::vector<std::vector<Interval>> out;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<Interval> pre;
    for (std::size_t n = 0; n < layers[l].outputs(); ++n) {
      Interval iv{layers[l].bias[n], layers[l].bias[n]};
      const auto& row = layers[l].weights[n];
      for (std::size_t k = 0; k < row.size(); ++k) {
        const double w = row[k];
        if (w >= 0) {
          iv.lo += w * current[k].lo;
          iv.hi += w * current[k].hi;
        } else {
          iv.lo += w * current[k].hi;
          iv.hi += w * current[k].lo;
        }
      }
      pre.push_back(iv);
    }
    out.push_back(pre);
    current.clear();
    for (const auto& iv : pre) current.push_back({std::max(0.0, iv.lo), std::max(0.0, iv.hi)});
  }
  return out;
}

enum class Sense { LessEqual, GreaterEqual, Equal };

struct LinearTerm {
  double coef = 0.0;
  std::string var;

  bool operator==(const LinearTerm&) const = default;
};

struct LinearConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;

  bool operator==(const LinearConstraint&) const = default;
};

struct VariableBound {
  double lo = 0.0;  // -inf allowed
  double hi = std::numeric_limits<double>::infinity();

  bool operator==(const VariableBound&) const = default;
};

struct MilpInstance {
  std::vector<std::string> comments;
  std::string objective = "eps";  // maximized
  std::vector<LinearConstraint> constraints;
  std::map<std::string, VariableBound> bounds;
  std::vector<std::string> binaries;
  std::map<std::string, double> big_m;  // per neuron: max(|lo|, |hi|) of its pre-activation

  std::size_t binary_count() const { return binaries.size(); }
};

namespace detail {

inline std::string neuron(const char* prefix, std::size_t layer, std::size_t n) {
  return std::string(prefix) + "_" + std::to_string(layer) + "_" + std::to_string(n);
}

inline double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

// Adds the symbolic network copy over inputs z_1..z_m: variables, big-M
// ReLU constraints, bounds and binaries. Returns the output variable names.
inline std::vector<std::string> encode_network(MilpInstance& inst, const ReluNetwork& net) {
  const auto ibp = relu_bigM_bounds(net);
  const auto& layers = net.layers();
  std::vector<std::string> inputs;
  for (std::size_t i = 0; i < net.input_size(); ++i) {
    std::string z = "z_" + std::to_string(i + 1);
    inst.bounds[z] = VariableBound{net.input_bounds()[i].lower, net.input_bounds()[i].upper};
    inputs.push_back(std::move(z));
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const bool hidden = l + 1 < layers.size();
    std::vector<std::string> next;
    for (std::size_t n = 0; n < layers[l].outputs(); ++n) {
      const Interval iv = ibp[l][n];
      const std::string pre = neuron("pre", l + 1, n + 1);
      LinearConstraint lin{neuron("lin", l + 1, n + 1), {{1.0, pre}}, Sense::Equal, clean_zero(layers[l].bias[n])};
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        const double w = layers[l].weights[n][k];
        if (w != 0.0) lin.terms.push_back({-w, inputs[k]});
      }
      inst.constraints.push_back(std::move(lin));
      inst.bounds[pre] = VariableBound{iv.lo, iv.hi};
      inst.big_m[pre] = std::max(std::abs(iv.lo), std::abs(iv.hi));
      if (!hidden) {
        next.push_back(pre);
        continue;
      }
      const std::string post = neuron("post", l + 1, n + 1);
      const std::string d = neuron("d", l + 1, n + 1);
      // post >= pre;  post <= pre - lo (1 - d);  post <= hi d;  post >= 0
      inst.constraints.push_back({neuron("relu_a", l + 1, n + 1), {{1.0, post}, {-1.0, pre}}, Sense::GreaterEqual, 0.0});
      inst.constraints.push_back({neuron("relu_b", l + 1, n + 1),
                                  {{1.0, post}, {-1.0, pre}, {clean_zero(-iv.lo), d}},
                                  Sense::LessEqual,
                                  clean_zero(-iv.lo)});
      inst.constraints.push_back(
          {neuron("relu_c", l + 1, n + 1), {{1.0, post}, {clean_zero(-iv.hi), d}}, Sense::LessEqual, 0.0});
      inst.bounds[post] = VariableBound{std::max(0.0, iv.lo), std::max(0.0, iv.hi)};
      inst.binaries.push_back(d);
      next.push_back(post);
    }
    inputs = std::move(next);
  }
  return inputs;
}

// |z_i - center_i| <= eps for every input.
inline void encode_ball(MilpInstance& inst, std::span<const double> center) {
  for (std::size_t i = 0; i < center.size(); ++i) {
    const std::string z = "z_" + std::to_string(i + 1);
    inst.constraints.push_back({"ball_lo_" + std::to_string(i + 1), {{1.0, z}, {1.0, "eps"}}, Sense::GreaterEqual,
                                clean_zero(center[i])});
    inst.constraints.push_back({"ball_hi_" + std::to_string(i + 1), {{1.0, z}, {-1.0, "eps"}}, Sense::LessEqual,
                                clean_zero(center[i])});
  }
}

inline void finalize(MilpInstance& inst) {
  std::sort(inst.constraints.begin(), inst.constraints.end(),
            [](const LinearConstraint& a, const LinearConstraint& b) { return a.name < b.name; });
  std::sort(inst.binaries.begin(), inst.binaries.end());
}

}  // namespace detail

struct GapInstance {
  double lo = 0.0;  // consecutive cell coordinates bounding the cut
  double hi = 0.0;
  MilpInstance instance;
};

struct MilpEncoding {
  std::size_t category = 0;
  std::size_t dimension = 0;
  std::size_t element = 1;
  double eta = 0.0;
  std::vector<GapInstance> gaps;
  MilpInstance falsify;
  double falsify_radius = 0.0;
};

/// Encodes the cut-placement problem for `candidate` on partition category
/// `category`. `cases` are the existing cases; only those sharing the
/// candidate's cell constrain the cut. Without an explicit radius the
/// falsification instance uses the best margin over all gaps.
inline MilpEncoding encode(const ReluNetwork& net, const Evaluator& evaluator, const Categorization& cat,
                           const TestCase& candidate, std::span<const TestCase> cases, std::size_t category,
                           double eta, std::optional<double> falsify_radius = std::nullopt) {
  const auto* bucket = std::get_if<OutputBucket>(&evaluator);
  if (!bucket)
    throw Error(ErrorKind::NonLinearEvaluator, "only bucket evaluators are linear in the network output");
  if (category >= cat.size() || !cat.partition(category))
    throw Error(ErrorKind::InvalidCut, "category " + std::to_string(category) + " is not a partition");
  require_in_bounds(candidate.x, net.input_bounds());
  if (bucket->output_index >= net.output_size())
    throw Error(ErrorKind::DimensionMismatch, "bucket reads a missing output");

  const auto& part = *cat.partition(category);
  const CellSignature cell = signature_of(cat, candidate.x);
  MilpEncoding enc;
  enc.category = category;
  enc.dimension = part.dimension();
  enc.element = cell.elements[category];
  enc.eta = eta;

  struct Point {
    double coord;
    EvalValue value;
  };
  std::vector<Point> pts;
  for (const auto& c : cases) {
    require_in_bounds(c.x, net.input_bounds());
    if (signature_of(cat, c.x) == cell) pts.push_back({c.x[enc.dimension], c.eval});
  }
  pts.push_back({candidate.x[enc.dimension], candidate.eval});
  std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.coord < b.coord; });

  auto homogeneous = [&](std::size_t from, std::size_t to) {
    for (std::size_t r = from + 1; r < to; ++r)
      if (!(pts[r].value == pts[from].value)) return false;
    return true;
  };

  const std::int64_t cls = bucket->class_of(net.forward(candidate.x)[bucket->output_index]);
  const std::size_t classes = bucket->class_count();
  const std::string y = "pre_" + std::to_string(net.layers().size()) + "_" + std::to_string(bucket->output_index + 1);

  auto add_class_constraints = [&](MilpInstance& inst) {
    if (cls > 0)
      inst.constraints.push_back({"class_lo", {{1.0, y}}, Sense::GreaterEqual, bucket->thresholds[cls]});
    if (static_cast<std::size_t>(cls) + 1 < classes)
      inst.constraints.push_back({"class_hi", {{1.0, y}}, Sense::LessEqual, bucket->thresholds[cls + 1]});
  };

  double best_margin = 0.0;
  for (std::size_t split = 1; split < pts.size(); ++split) {
    const double lo = pts[split - 1].coord;
    const double hi = pts[split].coord;
    if (!(lo < hi) || !homogeneous(0, split) || !homogeneous(split, pts.size())) continue;
    best_margin = std::max(best_margin, (hi - lo) / 2.0);

    GapInstance gap{lo, hi, {}};
    MilpInstance& inst = gap.instance;
    inst.comments.push_back("cut on x" + std::to_string(enc.dimension + 1) + ", element " +
                            std::to_string(enc.element) + ", gap (" + format_double(lo) + ", " + format_double(hi) +
                            ")");
    inst.comments.push_back("robustness claim over the eps-ball must be confirmed by the falsify instance");
    for (std::size_t r = 0; r < pts.size(); ++r) {
      const std::string idx = std::to_string(r + 1);
      const double x = pts[r].coord;
      if (r < split) {
        // beta - x >= eta and eps <= beta - x
        inst.constraints.push_back({"dist_" + idx, {{1.0, "beta"}}, Sense::GreaterEqual, x + eta});
        inst.constraints.push_back({"marg_" + idx, {{1.0, "eps"}, {-1.0, "beta"}}, Sense::LessEqual,
                                    detail::clean_zero(-x)});
      } else {
        inst.constraints.push_back({"dist_" + idx, {{1.0, "beta"}}, Sense::LessEqual, x - eta});
        inst.constraints.push_back({"marg_" + idx, {{1.0, "eps"}, {1.0, "beta"}}, Sense::LessEqual,
                                    detail::clean_zero(x)});
      }
    }
    inst.bounds["beta"] = VariableBound{lo, hi};
    inst.bounds["eps"] = VariableBound{0.0, std::numeric_limits<double>::infinity()};
    detail::encode_ball(inst, candidate.x);
    detail::encode_network(inst, net);
    add_class_constraints(inst);
    detail::finalize(inst);
    enc.gaps.push_back(std::move(gap));
  }
  if (enc.gaps.empty())
    throw Error(ErrorKind::NoCandidateGap, "no gap on x" + std::to_string(enc.dimension + 1) +
                                               " separates '" + candidate.id + "' from its cell");

  enc.falsify_radius = falsify_radius.value_or(best_margin);
  MilpInstance& f = enc.falsify;
  f.comments.push_back("feasible iff some input within eps = " + format_double(enc.falsify_radius) +
                       " of the new case leaves its output class " + std::to_string(cls));
  f.bounds["eps"] = VariableBound{enc.falsify_radius, enc.falsify_radius};
  detail::encode_ball(f, candidate.x);
  detail::encode_network(f, net);
  const Interval out_iv = relu_bigM_bounds(net).back()[bucket->output_index];
  const bool below = cls > 0;
  const bool above = static_cast<std::size_t>(cls) + 1 < classes;
  if (below && above) {
    // s = 0: y <= t_c,  s = 1: y >= t_{c+1}
    const double t_lo = bucket->thresholds[cls];
    const double t_hi = bucket->thresholds[cls + 1];
    const double m_lo = std::max(0.0, out_iv.hi - t_lo);
    const double m_hi = std::max(0.0, t_hi - out_iv.lo);
    f.constraints.push_back({"flip_lo", {{1.0, y}, {detail::clean_zero(-m_lo), "s_flip"}}, Sense::LessEqual, t_lo});
    f.constraints.push_back(
        {"flip_hi", {{1.0, y}, {detail::clean_zero(-m_hi), "s_flip"}}, Sense::GreaterEqual, detail::clean_zero(t_hi - m_hi)});
    f.binaries.push_back("s_flip");
  } else if (below) {
    f.constraints.push_back({"flip_lo", {{1.0, y}}, Sense::LessEqual, bucket->thresholds[cls]});
  } else if (above) {
    f.constraints.push_back({"flip_hi", {{1.0, y}}, Sense::GreaterEqual, bucket->thresholds[cls + 1]});
  } else {
    // A single class cannot be left.
    f.constraints.push_back({"flip_none", {{1.0, "eps"}}, Sense::GreaterEqual, enc.falsify_radius + 1.0});
  }
  detail::finalize(f);
  return enc;
}

namespace detail {

inline std::string format_terms(const std::vector<LinearTerm>& terms) {
  std::string out;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double c = terms[t].coef;
    const double mag = std::abs(c);
    if (t == 0) {
      if (c < 0) out += "- ";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (mag != 1.0) out += format_double(mag) + " ";
    out += terms[t].var;
  }
  return out;
}

inline std::string format_bound(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "+inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  return format_double(clean_zero(v));
}

}  // namespace detail

inline std::string write_lp(const MilpInstance& inst) {
  std::ostringstream os;
  for (const auto& c : inst.comments) os << "\\ " << c << "\n";
  os << "Maximize\n obj: " << inst.objective << "\n";
  os << "Subject To\n";
  std::vector<const LinearConstraint*> sorted;
  for (const auto& c : inst.constraints) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const LinearConstraint* a, const LinearConstraint* b) { return a->name < b->name; });
  for (const auto* c : sorted) {
    const char* sense = c->sense == Sense::LessEqual ? "<=" : c->sense == Sense::GreaterEqual ? ">=" : "=";
    os << " " << c->name << ": " << detail::format_terms(c->terms) << " " << sense << " "
       << format_double(detail::clean_zero(c->rhs)) << "\n";
  }
  if (!inst.bounds.empty()) {
    os << "Bounds\n";
    for (const auto& [var, b] : inst.bounds) {
      if (b.lo == b.hi)
        os << " " << var << " = " << detail::format_bound(b.lo) << "\n";
      else
        os << " " << detail::format_bound(b.lo) << " <= " << var << " <= " << detail::format_bound(b.hi) << "\n";
    }
  }
  if (!inst.binaries.empty()) {
    std::vector<std::string> bins = inst.binaries;
    std::sort(bins.begin(), bins.end());
    os << "Binaries\n";
    for (const auto& b : bins) os << " " << b << "\n";
  }
  os << "End\n";
  return os.str();
}

/// Values of z, pre, post and d for the network evaluated at `z`; the
/// phase of a neuron with zero pre-activation is taken as inactive.
inline std::map<std::string, double> network_assignment(const ReluNetwork& net, std::span<const double> z) {
  std::map<std::string, double> a;
  std::vector<double> current(z.begin(), z.end());
  for (std::size_t i = 0; i < z.size(); ++i) a["z_" + std::to_string(i + 1)] = z[i];
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<double> next(layers[l].outputs());
    for (std::size_t n = 0; n < layers[l].outputs(); ++n) {
      double acc = layers[l].bias[n];
      for (std::size_t k = 0; k < current.size(); ++k) acc += layers[l].weights[n][k] * current[k];
      a[detail::neuron("pre", l + 1, n + 1)] = acc;
      if (l + 1 < layers.size()) {
        next[n] = std::max(0.0, acc);
        a[detail::neuron("post", l + 1, n + 1)] = next[n];
        a[detail::neuron("d", l + 1, n + 1)] = acc > 0.0 ? 1.0 : 0.0;
      } else {
        next[n] = acc;
      }
    }
    current.swap(next);
  }
  return a;
}

/// Names of constraints, bounds and integrality requirements violated by
/// `assignment` beyond `tol`. Variables missing from the assignment count
/// as violations of every constraint that mentions them.
inline std::vector<std::string> violated_constraints(const MilpInstance& inst,
                                                     const std::map<std::string, double>& assignment,
                                                     double tol = 1e-9) {
  std::vector<std::string> bad;
  for (const auto& c : inst.constraints) {
    double lhs = 0.0;
    bool missing = false;
    for (const auto& t : c.terms) {
      auto it = assignment.find(t.var);
      if (it == assignment.end()) {
        missing = true;
        break;
      }
      lhs += t.coef * it->second;
    }
    const bool ok = !missing && (c.sense == Sense::LessEqual      ? lhs <= c.rhs + tol
                                 : c.sense == Sense::GreaterEqual ? lhs >= c.rhs - tol
                                                                  : std::abs(lhs - c.rhs) <= tol);
    if (!ok) bad.push_back(c.name);
  }
  for (const auto& [var, b] : inst.bounds) {
    auto it = assignment.find(var);
    if (it == assignment.end() || it->second < b.lo - tol || it->second > b.hi + tol) bad.push_back("bound:" + var);
  }
  for (const auto& var : inst.binaries) {
    auto it = assignment.find(var);
    if (it == assignment.end() || (it->second != 0.0 && it->second != 1.0)) bad.push_back("binary:" + var);
  }
  return bad;
}

}  // namespace beq
