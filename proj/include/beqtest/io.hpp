#pragma once

// File formats: JSON documents for categorizations, ledgers, networks,
// evaluators, coverage reports and run state; CSV test-case streams; the
// key = value run configuration; JSON-lines event logs.
//
// In JSON, category and dimension indices are 0-based and element indices
// are 1-based.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "beqtest/core.hpp"
#include "beqtest/coverage.hpp"
#include "beqtest/evaluator.hpp"
#include "beqtest/lazy_build.hpp"
#include "beqtest/ledger.hpp"
#include "beqtest/module.hpp"
#include "beqtest/relu_network.hpp"

namespace beq {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- helpers

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + path + "'");
  out << content;
}

inline Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, origin + ": " + e.what());
  }
}

template <class Fn>
auto json_guard(const std::string& what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, what + ": " + e.what());
  }
}

inline Json eval_to_json(const EvalValue& v) {
  if (v.parts.size() == 1) return v.parts.front();
  return Json(v.parts);
}

inline Json signature_to_json(const CellSignature& sig) { return Json(sig.elements); }

// ---------------------------------------------------------- categorization

inline Json to_json(const Categorization& cat) {
  Json categories = Json::array();
  for (const auto& c : cat.categories()) {
    if (const auto* p = std::get_if<SimplePartitionCategory>(&c)) {
      Json j{{"kind", "partition"}, {"dimension", p->dimension()}, {"boundaries", p->boundaries()}};
      if (!p->element_labels().empty()) j["labels"] = p->element_labels();
      categories.push_back(std::move(j));
    } else {
      const auto& pc = std::get<PredicateCategory>(c);
      Json names = Json::array();
      for (const auto& e : pc.elements()) names.push_back(e.name);
      Json j{{"kind", "predicate"}, {"name", pc.name()}, {"elements", names}};
      if (const auto& ball = pc.expansion_ball())
        j["ball"] = Json{{"center", ball->center}, {"radius", ball->radius}};
      categories.push_back(std::move(j));
    }
  }
  return Json{{"revision", cat.revision()}, {"categories", categories}};
}

/// Predicate categories can only be restored when they carry the ball of a
/// built-in expansion predicate.
inline Categorization categorization_from_json(const Json& j) {
  return json_guard("categorization", [&] {
    std::vector<Category> categories;
    for (const auto& c : j.at("categories")) {
      const std::string kind = c.at("kind");
      if (kind == "partition") {
        std::vector<std::string> labels;
        if (c.contains("labels")) labels = c.at("labels").get<std::vector<std::string>>();
        categories.emplace_back(SimplePartitionCategory(c.at("dimension").get<std::size_t>(),
                                                        c.at("boundaries").get<std::vector<double>>(),
                                                        std::move(labels)));
      } else if (kind == "predicate") {
        if (!c.contains("ball"))
          throw Error(ErrorKind::ParseError, "predicate category '" + c.at("name").get<std::string>() +
                                                 "' has no serializable definition");
        LinfBall ball{c.at("ball").at("center").get<std::vector<double>>(), c.at("ball").at("radius").get<double>()};
        const auto names = c.at("elements").get<std::vector<std::string>>();
        if (names.size() != 2) throw Error(ErrorKind::ParseError, "expansion category needs two elements");
        categories.emplace_back(
            PredicateCategory::expansion(c.at("name").get<std::string>(), Predicate::within_ball(ball, names[1])));
      } else {
        throw Error(ErrorKind::ParseError, "unknown category kind '" + kind + "'");
      }
    }
    return Categorization(std::move(categories), j.at("revision").get<std::uint64_t>());
  });
}

// ------------------------------------------------------------------ ledger

inline Json to_json(const EquivalenceLedger& ledger) {
  Json cells = Json::array();
  for (const auto& [sig, rec] : ledger.cells())
    cells.push_back(Json{{"signature", signature_to_json(sig)}, {"value", eval_to_json(rec.value)}, {"witnesses", rec.witnesses}});
  return Json{{"revision", ledger.revision()}, {"cells", cells}};
}

inline Json to_json(const Violation& v) {
  return Json{{"cell", signature_to_json(v.cell)},
              {"existing_value", eval_to_json(v.existing_value)},
              {"new_value", eval_to_json(v.new_value)},
              {"conflicting_witness", v.conflicting_witness},
              {"offender", v.offender}};
}

// ----------------------------------------------------------------- network

inline Json to_json(const ReluNetwork& net) {
  Json layers = Json::array();
  for (const auto& l : net.layers()) layers.push_back(Json{{"w", l.weights}, {"b", l.bias}});
  Json bounds = Json::array();
  for (const auto& b : net.input_bounds()) bounds.push_back(Json::array({b.lower, b.upper}));
  return Json{{"layers", layers}, {"bounds", bounds}};
}

inline ReluNetwork network_from_json(const Json& j) {
  return json_guard("network", [&] {
    std::vector<DenseLayer> layers;
    for (const auto& l : j.at("layers"))
      layers.push_back(DenseLayer{l.at("w").get<std::vector<std::vector<double>>>(), l.at("b").get<std::vector<double>>()});
    std::vector<Bound> bounds;
    for (const auto& b : j.at("bounds")) {
      if (b.size() != 2) throw Error(ErrorKind::ParseError, "bound must be [lower, upper]");
      bounds.push_back(Bound{b.at(0).get<double>(), b.at(1).get<double>()});
    }
    return ReluNetwork(std::move(layers), std::move(bounds));
  });
}

// --------------------------------------------------------------- evaluator

inline Json to_json(const Evaluator& e) {
  if (const auto* b = std::get_if<OutputBucket>(&e))
    return Json{{"kind", "bucket"}, {"thresholds", b->thresholds}, {"output_index", b->output_index}};
  if (const auto* l = std::get_if<LabelMatch>(&e))
    return Json{{"kind", "label"}, {"output_index", l->output_index}, {"decision_threshold", l->decision_threshold}};
  return Json{{"kind", "cell"}};
}

inline Evaluator evaluator_from_json(const Json& j) {
  return json_guard("evaluator", [&]() -> Evaluator {
    const std::string kind = j.at("kind");
    Evaluator e;
    if (kind == "bucket")
      e = OutputBucket{j.at("thresholds").get<std::vector<double>>(), j.value("output_index", std::size_t{0})};
    else if (kind == "label")
      e = LabelMatch{j.value("output_index", std::size_t{0}), j.value("decision_threshold", 0.5)};
    else if (kind == "cell")
      e = CellIdentity{};
    else
      throw Error(ErrorKind::ParseError, "unknown evaluator kind '" + kind + "'");
    validate(e);
    return e;
  });
}

// ---------------------------------------------------------------- coverage

inline Json to_json(const CoverageReport& r) {
  Json uncovered = Json::array();
  for (const auto& c : r.uncovered) uncovered.push_back(Json{{"categories", c.categories}, {"elements", c.elements}});
  Json j{{"gamma", r.gamma},
         {"total_combinations", r.total_combinations},
         {"covered", r.covered},
         {"ratio", r.ratio},
         {"tuple_bound", r.tuple_bound},
         {"uncovered", uncovered}};
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

/// One row per uncovered combination: space-separated category indices,
/// then space-separated element indices.
inline std::string coverage_csv(const CoverageReport& r) {
  std::string out = "categories,elements\n";
  for (const auto& c : r.uncovered) {
    for (std::size_t k = 0; k < c.categories.size(); ++k) out += (k ? " " : "") + std::to_string(c.categories[k]);
    out += ',';
    for (std::size_t k = 0; k < c.elements.size(); ++k) out += (k ? " " : "") + std::to_string(c.elements[k]);
    out += '\n';
  }
  return out;
}

// ------------------------------------------------------------ event & trend

inline std::string events_jsonl(const std::vector<BuildEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    Json j{{"case", e.case_id}, {"action", to_string(e.action)}};
    j["category"] = e.category ? Json(*e.category) : Json(nullptr);
    j["beta"] = e.beta ? Json(*e.beta) : Json(nullptr);
    j["margin"] = e.margin ? Json(*e.margin) : Json(nullptr);
    j["revision"] = e.revision;
    if (!e.method.empty()) j[e.action == EventAction::Warning ? "message" : "method"] = e.method;
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline std::string trend_csv(const std::vector<TrendRow>& rows) {
  std::string out = "cases";
  const std::size_t m = rows.empty() ? 0 : rows.front().elements.size();
  for (std::size_t i = 0; i < m; ++i) out += ",c" + std::to_string(i + 1);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.cases);
    for (auto e : r.elements) out += "," + std::to_string(e);
    out += '\n';
  }
  return out;
}

// --------------------------------------------------------------------- CSV

struct CsvRow {
  std::size_t line = 0;
  std::string id;
  std::vector<double> x;
  std::optional<std::int64_t> label;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t k = 0;
  while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
  return s.substr(k);
}

}  // namespace detail

/// Parses `id,x1,...,xm[,label]`. Every data row must have the header's
/// arity and finite coordinates.
inline std::vector<CsvRow> parse_cases_csv(const std::string& text, std::size_t arity, const std::string& origin = "csv") {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<CsvRow> rows;
  bool has_label = false;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty()) continue;
    auto cells = detail::split(line, ',');
    for (auto& c : cells) c = detail::trim(c);
    auto fail = [&](const std::string& msg) {
      throw Error(ErrorKind::ParseError, origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (!header_seen) {
      header_seen = true;
      if (cells.empty() || cells[0] != "id") fail("header must start with 'id'");
      has_label = cells.back() == "label";
      const std::size_t xs = cells.size() - 1 - (has_label ? 1 : 0);
      if (xs != arity) fail("header declares " + std::to_string(xs) + " inputs, module expects " + std::to_string(arity));
      for (std::size_t i = 0; i < xs; ++i) {
        if (cells[i + 1] != "x" + std::to_string(i + 1)) fail("expected column x" + std::to_string(i + 1));
      }
      continue;
    }
    const std::size_t expected = 1 + arity + (has_label ? 1 : 0);
    if (cells.size() != expected)
      fail("expected " + std::to_string(expected) + " fields, got " + std::to_string(cells.size()));
    CsvRow row;
    row.line = lineno;
    row.id = cells[0];
    if (row.id.empty()) fail("empty id");
    for (std::size_t i = 0; i < arity; ++i) {
      auto v = parse_double(cells[i + 1]);
      if (!v || !std::isfinite(*v)) fail("x" + std::to_string(i + 1) + " is not a finite number: '" + cells[i + 1] + "'");
      row.x.push_back(*v);
    }
    if (has_label) {
      auto v = parse_double(cells.back());
      if (!v || !std::isfinite(*v) || *v != std::floor(*v)) fail("label must be an integer");
      row.label = static_cast<std::int64_t>(*v);
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(ErrorKind::ParseError, origin + ": missing header");
  return rows;
}

inline std::string cases_csv(const std::vector<TestCase>& cases, std::size_t arity) {
  bool labels = !cases.empty() && cases.front().label.has_value();
  std::string out = "id";
  for (std::size_t i = 0; i < arity; ++i) out += ",x" + std::to_string(i + 1);
  if (labels) out += ",label";
  out += '\n';
  for (const auto& c : cases) {
    out += c.id;
    for (double v : c.x) out += "," + format_double(v);
    if (labels) out += "," + std::to_string(c.label.value_or(0));
    out += '\n';
  }
  return out;
}

/// Computes outputs and evaluation values for parsed rows; bounds errors
/// are reported with the row's line number.
inline std::vector<TestCase> ingest(const std::vector<CsvRow>& rows, const ModuleUnderTest& module,
                                    const Categorization* cat, const std::string& origin = "csv") {
  std::vector<TestCase> cases;
  cases.reserve(rows.size());
  for (const auto& r : rows) {
    try {
      cases.push_back(module.make_case(r.id, r.x, r.label, cat));
    } catch (const Error& e) {
      throw Error(e.kind(), origin + ":" + std::to_string(r.line) + ": " + e.message());
    }
  }
  return cases;
}

// ------------------------------------------------------------- run config

/// Parsed `key = value` configuration. Lines starting with '#' and blank
/// lines are ignored; unknown keys are rejected.
struct RunConfig {
  std::string network = "toy:lka";  // path to network JSON or toy:lka|toy:acc|toy:flip
  std::uint64_t seed = 7;
  std::string evaluator = "bucket";  // bucket | label | cell
  std::vector<double> thresholds;    // empty: uniform split of output_range
  std::optional<std::pair<double, double>> output_range;
  std::size_t classes = 5;
  std::size_t output_index = 0;
  double decision_threshold = 0.5;
  RefinementConfig refinement;
  std::size_t gamma = 2;
  std::vector<Bound> bounds_override;
  CheckpointPlan checkpoints;
  std::optional<std::size_t> milp_category;  // 0-based internally
  std::optional<double> falsify_radius;
};

namespace detail {

inline std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& cell : split(value, ',')) {
    auto v = parse_double(cell);
    if (!v || !std::isfinite(*v)) throw Error(ErrorKind::InvalidConfig, key + ": bad number '" + cell + "'");
    out.push_back(*v);
  }
  return out;
}

inline std::size_t parse_count(const std::string& key, const std::string& value) {
  auto v = parse_double(value);
  if (!v || *v < 0 || *v != std::floor(*v) || *v > 1e15)
    throw Error(ErrorKind::InvalidConfig, key + ": expected a non-negative integer, got '" + value + "'");
  return static_cast<std::size_t>(*v);
}

inline double parse_positive(const std::string& key, const std::string& value) {
  auto v = parse_double(value);
  if (!v || !(*v > 0) || !std::isfinite(*v))
    throw Error(ErrorKind::InvalidConfig, key + ": expected a positive number, got '" + value + "'");
  return *v;
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text, const std::string& origin = "config") {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    auto where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      if (key == "network") cfg.network = value;
      else if (key == "seed") cfg.seed = detail::parse_count(key, value);
      else if (key == "evaluator") {
        if (value != "bucket" && value != "label" && value != "cell")
          throw Error(ErrorKind::InvalidConfig, "evaluator must be bucket, label or cell");
        cfg.evaluator = value;
      } else if (key == "thresholds") cfg.thresholds = detail::parse_list(key, value);
      else if (key == "output_range") {
        auto r = detail::parse_list(key, value);
        if (r.size() != 2 || !(r[0] < r[1])) throw Error(ErrorKind::InvalidConfig, "output_range needs lo,hi with lo < hi");
        cfg.output_range = std::pair{r[0], r[1]};
      } else if (key == "classes") cfg.classes = detail::parse_count(key, value);
      else if (key == "output_index") cfg.output_index = detail::parse_count(key, value);
      else if (key == "decision_threshold") cfg.decision_threshold = detail::parse_list(key, value).at(0);
      else if (key == "eta") cfg.refinement.eta = detail::parse_positive(key, value);
      else if (key == "k") cfg.refinement.k = detail::parse_count(key, value);
      else if (key == "delta") cfg.refinement.delta = detail::parse_positive(key, value);
      else if (key == "dimension_order") {
        cfg.refinement.dimension_order.clear();
        for (double v : detail::parse_list(key, value)) {
          if (v < 1 || v != std::floor(v)) throw Error(ErrorKind::InvalidConfig, "dimension_order entries are 1-based");
          cfg.refinement.dimension_order.push_back(static_cast<std::size_t>(v) - 1);
        }
      } else if (key == "max_cuts_per_category") cfg.refinement.max_cuts_per_category = detail::parse_count(key, value);
      else if (key == "gamma") cfg.gamma = detail::parse_count(key, value);
      else if (key == "bounds") {
        cfg.bounds_override.clear();
        for (const auto& pair : detail::split(value, ',')) {
          auto parts = detail::split(pair, ':');
          auto lo = parts.size() == 2 ? parse_double(parts[0]) : std::nullopt;
          auto hi = parts.size() == 2 ? parse_double(parts[1]) : std::nullopt;
          if (!lo || !hi) throw Error(ErrorKind::InvalidConfig, "bounds entries are lower:upper");
          if (!(*lo < *hi)) throw Error(ErrorKind::InvalidBound, "bound " + pair + " is empty");
          cfg.bounds_override.push_back(Bound{*lo, *hi});
        }
      } else if (key == "checkpoints") {
        cfg.checkpoints.explicit_points.clear();
        for (double v : detail::parse_list(key, value)) cfg.checkpoints.explicit_points.push_back(detail::parse_count(key, format_double(v)));
      } else if (key == "checkpoint_every") cfg.checkpoints.every = detail::parse_count(key, value);
      else if (key == "milp_category") {
        const auto c = detail::parse_count(key, value);
        if (c < 1) throw Error(ErrorKind::InvalidConfig, "milp_category is 1-based");
        cfg.milp_category = c - 1;
      } else if (key == "falsify_radius") cfg.falsify_radius = detail::parse_positive(key, value);
      else throw Error(ErrorKind::InvalidConfig, "unknown key '" + key + "'");
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.message());
    }
  }
  cfg.refinement.validate();
  return cfg;
}

/// Seed from BEQTEST_SEED when set, else the configured one.
inline std::uint64_t effective_seed(const RunConfig& cfg) {
  if (const char* env = std::getenv("BEQTEST_SEED")) {
    auto v = parse_double(env);
    if (!v || *v < 0 || *v != std::floor(*v)) throw Error(ErrorKind::InvalidConfig, "BEQTEST_SEED must be an integer");
    return static_cast<std::uint64_t>(*v);
  }
  return cfg.seed;
}

inline ReluNetwork load_network(const RunConfig& cfg, const std::string& base_dir = "") {
  ReluNetwork net;
  if (cfg.network == "toy:lka") net = toy_lka_network(effective_seed(cfg));
  else if (cfg.network == "toy:acc") net = toy_acc_network(effective_seed(cfg));
  else if (cfg.network == "toy:flip") net = toy_flip_network();
  else {
    std::string path = cfg.network;
    if (!base_dir.empty() && !path.empty() && path.front() != '/') path = base_dir + "/" + path;
    net = network_from_json(parse_json(read_file(path), path));
  }
  if (!cfg.bounds_override.empty()) {
    if (cfg.bounds_override.size() != net.input_size())
      throw Error(ErrorKind::InvalidConfig, "bounds override has " + std::to_string(cfg.bounds_override.size()) +
                                                " entries, network has " + std::to_string(net.input_size()) + " inputs");
    net = ReluNetwork(net.layers(), cfg.bounds_override);
  }
  return net;
}

inline Evaluator make_evaluator(const RunConfig& cfg) {
  Evaluator e;
  if (cfg.evaluator == "label") {
    e = LabelMatch{cfg.output_index, cfg.decision_threshold};
  } else if (cfg.evaluator == "cell") {
    e = CellIdentity{};
  } else if (!cfg.thresholds.empty()) {
    e = OutputBucket{cfg.thresholds, cfg.output_index};
  } else {
    std::pair<double, double> range{-1.04, 1.04};
    if (cfg.output_range) range = *cfg.output_range;
    else if (cfg.network == "toy:acc") range = {-3.0, 2.0};
    if (cfg.network == "toy:flip" && !cfg.output_range) e = OutputBucket{{-1.0, 0.5, 1.0}, cfg.output_index};
    else e = OutputBucket::uniform(range.first, range.second, cfg.classes, cfg.output_index);
  }
  validate(e);
  return e;
}

// -------------------------------------------------------------------- state

/// Everything needed to reproduce evaluations and the believed equivalence:
/// the module, the refinement settings, the categorization, the ledger and
/// the processed cases (inputs and labels only; outputs are recomputed).
struct RunState {
  ModuleUnderTest module;
  RefinementConfig refinement;
  Categorization categorization;
  EquivalenceLedger ledger;
  std::vector<TestCase> cases;
};

inline Json to_json(const RunState& s) {
  Json cases = Json::array();
  for (const auto& c : s.cases) {
    Json j{{"id", c.id}, {"x", c.x}};
    if (c.label) j["label"] = *c.label;
    cases.push_back(std::move(j));
  }
  Json order = Json::array();
  for (auto d : s.refinement.order_for(s.module.net.input_size())) order.push_back(d + 1);
  return Json{{"format", "beqtest-state"},
              {"version", 1},
              {"network", to_json(s.module.net)},
              {"evaluator", to_json(s.module.evaluator)},
              {"refinement",
               Json{{"eta", s.refinement.eta},
                    {"k", s.refinement.k},
                    {"delta", s.refinement.delta},
                    {"dimension_order", order},
                    {"max_cuts_per_category", s.refinement.max_cuts_per_category}}},
              {"categorization", to_json(s.categorization)},
              {"ledger", to_json(s.ledger)},
              {"cases", cases}};
}

/// Restores a state and re-derives every evaluation; the ledger is rebuilt
/// from the cases, so a tampered or inconsistent state is rejected.
inline RunState state_from_json(const Json& j) {
  return json_guard("state", [&] {
    if (j.value("format", std::string{}) != "beqtest-state")
      throw Error(ErrorKind::ParseError, "not a beqtest state document");
    RunState s;
    s.module = ModuleUnderTest{network_from_json(j.at("network")), evaluator_from_json(j.at("evaluator"))};
    const auto& r = j.at("refinement");
    s.refinement.eta = r.at("eta").get<double>();
    s.refinement.k = r.at("k").get<std::size_t>();
    s.refinement.delta = r.at("delta").get<double>();
    s.refinement.max_cuts_per_category = r.value("max_cuts_per_category", std::size_t{10'000});
    s.refinement.dimension_order.clear();
    for (const auto& d : r.at("dimension_order")) s.refinement.dimension_order.push_back(d.get<std::size_t>() - 1);
    s.refinement.validate();
    s.categorization = categorization_from_json(j.at("categorization"));
    for (const auto& c : j.at("cases")) {
      std::optional<std::int64_t> label;
      if (c.contains("label")) label = c.at("label").get<std::int64_t>();
      s.cases.push_back(s.module.make_case(c.at("id").get<std::string>(), c.at("x").get<std::vector<double>>(), label,
                                           &s.categorization));
    }
    s.ledger = rebuild(s.cases, s.categorization);
    if (to_json(s.ledger) != j.at("ledger"))
      throw Error(ErrorKind::ParseError, "stored ledger does not match the cases under the stored categorization");
    return s;
  });
}

inline RunState load_state(const std::string& path) { return state_from_json(parse_json(read_file(path), path)); }

}  // namespace beq
