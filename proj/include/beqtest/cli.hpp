#pragma once

// `beqtest` command-line driver. Exit codes: 0 ok, 1 equivalence violation,
// 2 usage or input error, 3 build warning, 4 point not inconsistent.

#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "beqtest/coverage.hpp"
#include "beqtest/io.hpp"
#include "beqtest/lazy_build.hpp"
#include "beqtest/milp.hpp"

namespace beq {

enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitUsage = 2, kExitWarning = 3, kExitNotInconsistent = 4 };

namespace cli {

inline std::string signature_text(const CellSignature& sig) {
  std::string s = "[";
  for (std::size_t i = 0; i < sig.elements.size(); ++i) s += (i ? "," : "") + std::to_string(sig.elements[i]);
  return s + "]";
}

inline std::vector<double> parse_point(const std::string& text) {
  std::vector<double> x;
  for (const auto& cell : detail::split(text, ',')) {
    auto v = parse_double(cell);
    if (!v || !std::isfinite(*v)) throw Error(ErrorKind::ParseError, "bad coordinate '" + cell + "' in --point");
    x.push_back(*v);
  }
  return x;
}

inline std::vector<TestCase> load_cases(const std::string& path, const RunState& state) {
  const auto rows = parse_cases_csv(read_file(path), state.module.net.input_size(), path);
  return ingest(rows, state.module, &state.categorization, path);
}

inline int cmd_check(const std::string& cases_path, const std::string& state_path, std::ostream& out) {
  const RunState state = load_state(state_path);
  const auto cases = load_cases(cases_path, state);
  const auto result = check_believed_equivalence(cases, state.categorization);
  if (result.holds) {
    out << "holds: " << cases.size() << " cases, believed equivalence satisfied\n";
    return kExitOk;
  }
  out << "violated: " << result.violations.size() << " conflicting cell value(s)\n";
  for (const auto& v : result.violations) {
    out << "violation cell=" << signature_text(v.cell) << " witness=" << v.conflicting_witness
        << " value=" << v.existing_value.to_string() << " offender=" << v.offender
        << " value=" << v.new_value.to_string() << '\n';
  }
  return kExitViolation;
}

inline int cmd_coverage(const std::string& cases_path, const std::string& state_path, std::size_t gamma,
                        const std::string& out_prefix, std::ostream& out) {
  const RunState state = load_state(state_path);
  const std::size_t m = state.categorization.size();
  if (gamma < 1 || gamma > m)
    throw Error(ErrorKind::GammaOutOfRange, "gamma must be in [1, " + std::to_string(m) + "]");
  const auto cases = load_cases(cases_path, state);
  const auto report = gamma_coverage(cases, state.categorization, gamma);
  out << "gamma=" << gamma << " covered=" << report.covered << " total=" << report.total_combinations
      << " ratio=" << format_double(report.ratio) << " tuple_bound=" << report.tuple_bound << '\n';
  if (gamma == m) out << "full-combination mode: gamma equals the number of categories\n";
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  if (!out_prefix.empty()) {
    write_file(out_prefix + ".json", to_json(report).dump(2) + "\n");
    write_file(out_prefix + ".csv", coverage_csv(report));
  }
  return kExitOk;
}

inline int cmd_build(const std::string& stream_path, const std::string& config_path, const std::string& out_dir,
                     std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string base_dir;
  if (!config_path.empty()) {
    cfg = parse_run_config(read_file(config_path), config_path);
    base_dir = std::filesystem::path(config_path).parent_path().string();
  }
  RunState state;
  state.module = ModuleUnderTest{load_network(cfg, base_dir), make_evaluator(cfg)};
  state.refinement = cfg.refinement;
  const auto& bounds = state.module.input_bounds();
  state.refinement.order_for(bounds.size());

  const Categorization initial = initialize_from_bounds(bounds);
  const auto rows = parse_cases_csv(read_file(stream_path), bounds.size(), stream_path);
  const auto stream = ingest(rows, state.module, &initial, stream_path);
  auto eval_at = [&](std::span<const double> x) { return state.module.eval_at(x, &initial); };
  LazyBuildResult result = lazy_build(stream, bounds, eval_at, state.refinement, cfg.checkpoints);

  state.categorization = result.categorization;
  state.ledger = result.ledger;
  state.cases = result.processed;
  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/state.json", to_json(state).dump(2) + "\n");
  write_file(out_dir + "/events.jsonl", events_jsonl(result.events));
  write_file(out_dir + "/trend.csv", trend_csv(result.trend));

  if (result.warning) {
    write_file(out_dir + "/warning.json",
               Json{{"case", result.warning->case_id}, {"message", result.warning->message},
                    {"processed", result.processed.size()}}
                       .dump(2) +
                   "\n");
    err << "warning: case " << result.warning->case_id << ": " << result.warning->message << " (after "
        << result.processed.size() << " cases)\n";
    return kExitWarning;
  }
  out << "built: " << result.processed.size() << " cases, " << result.cuts << " cuts, "
      << result.ledger.cell_count() << " cells, revision " << result.categorization.revision() << '\n';
  return kExitOk;
}

struct EncodeOptions {
  std::string state_path;
  std::string point;
  std::string case_id;
  std::string cases_path;
  std::optional<std::size_t> category;  // 1-based as given on the command line
  std::optional<double> eta;
  std::optional<double> falsify_radius;
  std::string out_prefix;
};

inline int cmd_encode_milp(const EncodeOptions& opt, std::ostream& out) {
  const RunState state = load_state(opt.state_path);
  TestCase candidate;
  if (!opt.point.empty()) {
    candidate = state.module.make_case("point", parse_point(opt.point), std::nullopt, &state.categorization);
  } else {
    if (opt.cases_path.empty() || opt.case_id.empty())
      throw Error(ErrorKind::InvalidConfig, "give --point, or --cases with --case");
    const auto cases = load_cases(opt.cases_path, state);
    auto it = std::find_if(cases.begin(), cases.end(), [&](const TestCase& c) { return c.id == opt.case_id; });
    if (it == cases.end()) throw Error(ErrorKind::ParseError, "case '" + opt.case_id + "' not in " + opt.cases_path);
    candidate = *it;
  }
  const auto verdict = classify(candidate, state.ledger, state.categorization);
  if (verdict.kind != Consistency::Inconsistent) {
    out << "not inconsistent: " << to_string(verdict.kind) << " cell=" << signature_text(verdict.cell) << '\n';
    return kExitNotInconsistent;
  }
  const double eta = opt.eta.value_or(state.refinement.eta);

  std::vector<std::size_t> candidates;
  if (opt.category) {
    if (*opt.category < 1) throw Error(ErrorKind::InvalidConfig, "--category is 1-based");
    candidates.push_back(*opt.category - 1);
  } else {
    for (std::size_t c : state.refinement.order_for(state.categorization.size()))
      if (state.categorization.partition(c)) candidates.push_back(c);
  }
  std::optional<MilpEncoding> enc;
  for (std::size_t c : candidates) {
    try {
      enc = encode(state.module.net, state.module.evaluator, state.categorization, candidate, state.cases, c, eta,
                   opt.falsify_radius);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCandidateGap || opt.category) throw;
    }
  }
  if (!enc) throw Error(ErrorKind::NoCandidateGap, "no category offers an effective gap");

  const std::string stem = std::filesystem::path(opt.out_prefix).filename().string();
  Json gaps = Json::array();
  for (std::size_t g = 0; g < enc->gaps.size(); ++g) {
    const std::string name = opt.out_prefix + "_gap" + std::to_string(g + 1) + ".lp";
    write_file(name, write_lp(enc->gaps[g].instance));
    gaps.push_back(Json{{"lo", enc->gaps[g].lo},
                        {"hi", enc->gaps[g].hi},
                        {"file", stem + "_gap" + std::to_string(g + 1) + ".lp"},
                        {"binaries", enc->gaps[g].instance.binary_count()}});
  }
  write_file(opt.out_prefix + "_falsify.lp", write_lp(enc->falsify));
  const Json manifest{{"case", candidate.id},
                      {"cell", signature_to_json(verdict.cell)},
                      {"category", enc->category},
                      {"dimension", enc->dimension},
                      {"element", enc->element},
                      {"eta", enc->eta},
                      {"gaps", gaps},
                      {"falsify",
                       Json{{"file", stem + "_falsify.lp"},
                            {"radius", enc->falsify_radius},
                            {"binaries", enc->falsify.binary_count()}}}};
  write_file(opt.out_prefix + "_manifest.json", manifest.dump(2) + "\n");
  out << "encoded: category " << enc->category + 1 << " (x" << enc->dimension + 1 << "), " << enc->gaps.size()
      << " gap instance(s), falsify radius " << format_double(enc->falsify_radius) << '\n';
  return kExitOk;
}

inline int cmd_classify(const std::string& state_path, const std::string& point, std::optional<std::int64_t> label,
                        const std::string& id, std::ostream& out) {
  const RunState state = load_state(state_path);
  const auto candidate = state.module.make_case(id, parse_point(point), label, &state.categorization);
  const auto verdict = classify(candidate, state.ledger, state.categorization);
  out << to_string(verdict.kind) << " cell=" << signature_text(verdict.cell) << " value=" << candidate.eval.to_string();
  if (verdict.violation)
    out << " witness=" << verdict.violation->conflicting_witness
        << " witness_value=" << verdict.violation->existing_value.to_string();
  out << '\n';
  return verdict.kind == Consistency::Inconsistent ? kExitViolation : kExitOk;
}

/// Writes `count` inputs drawn uniformly from the network's input box.
inline int cmd_generate(const std::string& config_path, std::size_t count, std::optional<std::uint64_t> seed,
                        const std::string& out_path, const std::string& network_out, std::ostream& out) {
  RunConfig cfg;
  std::string base_dir;
  if (!config_path.empty()) {
    cfg = parse_run_config(read_file(config_path), config_path);
    base_dir = std::filesystem::path(config_path).parent_path().string();
  }
  const ReluNetwork net = load_network(cfg, base_dir);
  std::mt19937_64 rng(seed.value_or(effective_seed(cfg)) ^ 0x5eedcafeULL);
  const auto& bounds = net.input_bounds();
  std::size_t width = 5;
  for (std::size_t n = count; n >= 100000; n /= 10) ++width;
  std::string csv = "id";
  for (std::size_t i = 0; i < bounds.size(); ++i) csv += ",x" + std::to_string(i + 1);
  csv += '\n';
  for (std::size_t n = 1; n <= count; ++n) {
    std::string id = std::to_string(n);
    csv += "c" + std::string(width - std::min(width, id.size()), '0') + id;
    for (const auto& b : bounds) csv += "," + format_double(b.lower + (1.0 - detail::unit_uniform(rng)) * b.width());
    csv += '\n';
  }
  write_file(out_path, csv);
  if (!network_out.empty()) write_file(network_out, to_json(net).dump(2) + "\n");
  out << "generated " << count << " cases\n";
  return kExitOk;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Believed-equivalence testing of neural-network modules"};
  app.require_subcommand(1);

  std::string cases_path, state_path, stream_path, config_path, out_dir, out_prefix, point, id = "point";
  std::optional<std::size_t> gamma;
  std::optional<std::int64_t> label;

  auto* check = app.add_subcommand("check", "Check believed equivalence of a case file under a saved state");
  check->add_option("--cases", cases_path, "Test-case CSV")->required();
  check->add_option("--state", state_path, "state.json from build")->required();

  auto* coverage = app.add_subcommand("coverage", "Gamma-way combinatorial coverage of a case file");
  coverage->add_option("--cases", cases_path, "Test-case CSV")->required();
  coverage->add_option("--state", state_path, "state.json from build")->required();
  coverage->add_option("--gamma", gamma, "Combination strength (default: config gamma, else 2)");
  coverage->add_option("--config", config_path, "Run configuration supplying gamma");
  coverage->add_option("--out", out_prefix, "Write <out>.json and <out>.csv");

  auto* build = app.add_subcommand("build", "Build a categorization lazily from a case stream");
  build->add_option("--stream", stream_path, "Test-case CSV, processed in order")->required();
  build->add_option("--config", config_path, "key = value run configuration");
  build->add_option("--out-dir", out_dir, "Directory for state.json, events.jsonl, trend.csv")->required();

  cli::EncodeOptions enc;
  auto* encode_cmd = app.add_subcommand("encode-milp", "Emit MILP instances for placing a cut around a point");
  encode_cmd->add_option("--state", enc.state_path, "state.json from build")->required();
  encode_cmd->add_option("--point", enc.point, "Comma-separated input coordinates");
  encode_cmd->add_option("--cases", enc.cases_path, "Test-case CSV holding --case");
  encode_cmd->add_option("--case", enc.case_id, "Case id within --cases");
  encode_cmd->add_option("--category", enc.category, "1-based partition category to cut");
  encode_cmd->add_option("--eta", enc.eta, "Minimum margin (defaults to the state's)");
  encode_cmd->add_option("--falsify-radius", enc.falsify_radius, "Radius of the falsification instance");
  encode_cmd->add_option("--config", config_path, "Run configuration supplying milp_category and falsify_radius");
  encode_cmd->add_option("--out", enc.out_prefix, "Output prefix")->required();

  auto* classify_cmd = app.add_subcommand("classify", "Classify one point against a saved state");
  classify_cmd->add_option("--state", state_path, "state.json from build")->required();
  classify_cmd->add_option("--point", point, "Comma-separated input coordinates")->required();
  classify_cmd->add_option("--label", label, "Ground-truth label for label evaluators");
  classify_cmd->add_option("--id", id, "Name reported for the point");

  std::size_t count = 10000;
  std::optional<std::uint64_t> seed;
  std::string network_out;
  auto* generate = app.add_subcommand("generate", "Write uniformly random inputs for the configured network");
  generate->add_option("--config", config_path, "key = value run configuration");
  generate->add_option("--count", count, "Number of cases")->capture_default_str();
  generate->add_option("--seed", seed, "Random seed (defaults to the configured seed)");
  generate->add_option("--out", out_prefix, "Output CSV")->required();
  generate->add_option("--network-out", network_out, "Also write the network JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return cli::cmd_check(cases_path, state_path, out);
    std::optional<RunConfig> cfg;
    if (!config_path.empty() && (*coverage || *encode_cmd)) cfg = parse_run_config(read_file(config_path), config_path);
    if (*coverage) {
      const std::size_t g = gamma.value_or(cfg ? cfg->gamma : 2);
      return cli::cmd_coverage(cases_path, state_path, g, out_prefix, out);
    }
    if (*build) return cli::cmd_build(stream_path, config_path, out_dir, out, err);
    if (*encode_cmd) {
      if (cfg && !enc.category && cfg->milp_category) enc.category = *cfg->milp_category + 1;
      if (cfg && !enc.falsify_radius) enc.falsify_radius = cfg->falsify_radius;
      return cli::cmd_encode_milp(enc, out);
    }
    if (*classify_cmd) return cli::cmd_classify(state_path, point, label, id, out);
    if (*generate) return cli::cmd_generate(config_path, count, seed, out_prefix, network_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace beq
