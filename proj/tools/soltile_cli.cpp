// soltile: figure reproduction, patch export and property-suite runner.
//
// Exit status: 0 success, 1 a reported check failed, 2 usage or parameter error,
// 3 parameters outside the face-to-face regime.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "soltile/io.hpp"
#include "soltile/suite.hpp"

using namespace soltile;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotFaceToFace = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string subcommand;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<int> n;
  bool neg_b = false;
  std::string seq = "morse";
  std::vector<Index> oxtoby_blocks{4, 64, 1024};
  int radius = 1;
  int depth = 1;
  int steps = 1;
  Index bound = Index{1} << 10;
  std::uint64_t seed = suite::kSeed;
  std::string slice;
  std::string format;
  std::string out;

  // seq
  Index first = -16;
  Index last = 16;
  int word_len = 0;
  // hyper, tile, hull
  std::vector<Index> center;
  int precision = 4;
  Index rows = 3;
  double x_extent = 4.0;
  std::string mode = "orbit";
  // measure
  std::string measure_case;
  std::vector<double> g0{0.0, 0.0, 1.0};
  Index trials = 1000000;
  double h = 1e-3;
  // verify
  std::string only;
};

/// Group parameters from (--a, --b) or (--n, --neg-b); when both are given they
/// must describe the same group. --neg-b negates b.
SolParams resolve_params(const RunConfig& config) {
  if (config.b && !config.a) throw UsageError("--b requires --a");
  if (config.a && !config.b && !config.n) throw UsageError("--a requires --b or --n");
  const double a = config.a.value_or(1.0);
  if (config.n) {
    const auto params = SolParams::from_subdivision(*config.n, config.neg_b, a);
    if (config.b) {
      const double b = config.neg_b ? -*config.b : *config.b;
      if (std::fabs(b - params.b()) > 1e-9 * std::fabs(params.b())) {
        throw UsageError("--n " + std::to_string(*config.n) + " is inconsistent with --a/--b (expected b = " +
                         std::to_string(params.b()) + ")");
      }
    }
    return params;
  }
  if (config.b) return SolParams(a, config.neg_b ? -*config.b : *config.b);
  return SolParams::from_subdivision(2, config.neg_b, a);
}

BiSequence resolve_sequence(const RunConfig& config) {
  if (config.seq == "morse") return BiSequence::make_morse();
  if (config.seq == "oxtoby") return BiSequence::make_oxtoby(config.oxtoby_blocks);
  throw UsageError("--seq must be morse or oxtoby");
}

void require_format(const RunConfig& config, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (config.format == f) return;
  }
  std::string list;
  for (const char* f : allowed) list += std::string(list.empty() ? "" : ", ") + f;
  throw UsageError(config.subcommand + ": --format must be one of " + list);
}

void emit(const RunConfig& config, const std::string& text) {
  if (config.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream file(config.out);
  if (!file) throw UsageError("cannot write " + config.out);
  file << text;
  if (!text.empty() && text.back() != '\n') file << '\n';
}

// Face-to-face gate for the tiling subcommands: prints the witness and returns false.
bool check_face_to_face(const SolParams& params) {
  const auto report = face_to_face_check(params, 8);
  if (report.face_to_face) return true;
  std::cerr << "error: Sol(" << params.a() << "," << params.b() << ") is not face-to-face";
  if (report.witness) {
    const auto& w = *report.witness;
    std::cerr << ": tile " << to_string(w.lower) << " has y-range [" << w.lower_y.lo << ", " << w.lower_y.hi
              << "] and tile " << to_string(w.upper) << " above it has y-range [" << w.upper_y.lo << ", "
              << w.upper_y.hi << "]; the faces overlap without matching";
  }
  std::cerr << '\n';
  return false;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_seq(RunConfig config) {
  if (config.format.empty()) config.format = "text";
  require_format(config, {"text", "json"});
  if (config.last < config.first) throw UsageError("seq: --to must be >= --from");
  if (config.last - config.first > 1000000) throw UsageError("seq: window longer than 10^6");
  const auto omega = resolve_sequence(config);
  const auto values = omega.window(config.first, config.last);
  std::optional<Index> gap;
  if (config.word_len > 0) gap = is_repetitive(omega, config.word_len, config.bound);
  if (config.format == "json") {
    Json j{{"sequence", omega.name()}, {"from", config.first}, {"to", config.last}, {"values", values}};
    if (config.word_len > 0) {
      j["word_len"] = config.word_len;
      j["bound"] = config.bound;
      j["gap"] = gap ? Json(*gap) : Json(nullptr);
    }
    emit(config, j.dump(2));
  } else {
    std::string text = omega.name() + " [" + std::to_string(config.first) + ", " + std::to_string(config.last) + "]: ";
    for (int v : values) text += static_cast<char>('0' + v);
    if (config.word_len > 0) {
      text += "\nwords of length " + std::to_string(config.word_len) + ": " +
              (gap ? "recur with gap " + std::to_string(*gap) : "no gap found within the bound");
    }
    emit(config, text);
  }
  return 0;
}

int cmd_hyper(RunConfig config) {
  if (config.format.empty()) config.format = "json";
  require_format(config, {"json", "svg"});
  if (config.radius < 0) throw UsageError("hyper: --radius must be >= 0");
  if (!config.center.empty() && config.center.size() != 2) throw UsageError("hyper: --center takes i,j");
  const HTileAddress center = config.center.empty() ? HTileAddress{0, 0} : HTileAddress{config.center[0], config.center[1]};
  const auto omega = resolve_sequence(config);
  const auto tiles = h_patch(center, config.radius);
  emit(config, config.format == "svg" ? hyper_svg(tiles, omega) : hyper_patch_to_json(tiles, omega).dump(2));
  return 0;
}

int cmd_tile(RunConfig config) {
  if (config.format.empty()) config.format = config.slice.empty() ? "json" : "svg";
  require_format(config, {"json", "svg"});
  const auto params = resolve_params(config);
  if (!check_face_to_face(params)) return kExitNotFaceToFace;
  const auto omega = resolve_sequence(config);
  if (config.format == "svg") {
    if (config.rows < 0 || config.rows > 12) throw UsageError("tile: --rows must be in [0, 12]");
    const auto slice = parse_slice(config.slice.empty() ? "y=0.25" : config.slice);
    emit(config, slice_svg(params, slice, omega, -config.rows, config.rows, config.x_extent));
    return 0;
  }
  if (config.radius < 0) throw UsageError("tile: --radius must be >= 0");
  if (!config.center.empty() && config.center.size() != 3) throw UsageError("tile: --center takes i,j,k");
  const TileAddress center = config.center.empty() ? TileAddress{0, 0, 0}
                                                   : TileAddress{config.center[0], config.center[1], config.center[2]};
  emit(config, patch_to_json(params, patch(params, center, config.radius, omega)).dump(2));
  return 0;
}

int cmd_hull(RunConfig config) {
  if (config.format.empty()) config.format = "json";
  require_format(config, {"json", "text"});
  const auto params = resolve_params(config);
  if (!check_face_to_face(params)) return kExitNotFaceToFace;
  const auto omega = resolve_sequence(config);
  if (config.mode == "lp") {
    const auto report = invariant_measure_feasibility(params, config.depth, omega);
    emit(config, config.format == "json" ? invariant_measure_to_json(report).dump(2) : certificate_text(report));
    return report.verified ? 0 : kExitFailed;
  }
  if (config.mode != "orbit") throw UsageError("hull: --mode must be orbit or lp");
  if (!config.center.empty() && config.center.size() != 3) throw UsageError("hull: --center takes i,j,k");
  const TileAddress tile = config.center.empty() ? TileAddress{0, 0, 0}
                                                 : TileAddress{config.center[0], config.center[1], config.center[2]};
  const auto code = code_of_tile(params, tile, omega, config.precision);
  const auto graph = orbit_graph(code, config.steps);
  if (config.format == "json") {
    emit(config, Json{{"start", code_to_json(code)}, {"steps", config.steps}, {"graph", orbit_graph_to_json(graph)}}.dump(2));
  } else {
    std::string text = "orbit graph: " + std::to_string(graph.nodes.size()) + " codes, " +
                       std::to_string(graph.edges.size()) + " edges within " + std::to_string(config.steps) +
                       " steps of tile " + to_string(tile) + "\n";
    for (const auto& e : graph.edges) {
      text += std::to_string(e.from) + " -" + to_string(e.move) + "-> " + std::to_string(e.to) + "\n";
    }
    emit(config, text);
  }
  return 0;
}

int cmd_measure(RunConfig config) {
  if (config.format.empty()) config.format = "json";
  require_format(config, {"json"});
  if (config.g0.size() != 3) throw UsageError("measure: --g0 takes x,y,z");
  SolParams params = resolve_params(config);
  if (!config.a && !config.n) params = SolParams(1.0, 2.0);
  const GroupElement g0{config.g0[0], config.g0[1], config.g0[2]};
  MeasureReport report;
  report.case_name = config.measure_case;
  if (config.measure_case == "pushforward") {
    const auto r = pushforward_check(params, g0, config.trials, config.seed);
    report.estimate = r.estimate;
    report.reference = r.reference;
    report.tolerance = 3.0 * r.std_error;
  } else if (config.measure_case == "harmonic") {
    report.estimate = suite::detail::harmonic_residual(params, config.h);
    report.reference = 0.0;
    report.tolerance = 1e-6;
  } else if (config.measure_case == "modular") {
    // homomorphism defect of the modular function on (g0, g0^{-1} * (1,1,1))
    const GroupElement g1 = mul(params, inv(params, g0), {1.0, 1.0, 1.0});
    report.estimate = modular(params, mul(params, g0, g1)) / (modular(params, g0) * modular(params, g1));
    report.reference = 1.0;
    report.tolerance = 1e-12;
  } else {
    throw UsageError("measure: --case must be pushforward, harmonic or modular");
  }
  report.pass = std::fabs(report.estimate - report.reference) <= report.tolerance;
  Json j = measure_report_to_json(report);
  j["params"] = params_to_json(params);
  if (config.measure_case == "pushforward") {
    j["trials"] = config.trials;
    j["seed"] = config.seed;
  }
  emit(config, j.dump(2));
  return report.pass ? 0 : kExitFailed;
}

int cmd_verify(RunConfig config) {
  if (config.format.empty()) config.format = "text";
  require_format(config, {"text", "json"});
  const auto& names = suite::module_names();
  if (!config.only.empty() && std::find(names.begin(), names.end(), config.only) == names.end()) {
    throw UsageError("verify: unknown module '" + config.only + "'");
  }
  const auto results = suite::run_checks(config.only);
  bool all = true;
  for (const auto& r : results) all = all && r.passed();
  if (config.format == "json") {
    emit(config, suite::results_to_json(results).dump(2));
  } else {
    std::string text;
    for (const auto& r : results) text += suite::format_line(r) + "\n";
    text += all ? "all checks passed\n" : "some checks failed\n";
    emit(config, text);
  }
  return all ? 0 : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tilings of Sol(a,b): patches, hull codes and measure checks"};
  app.require_subcommand(1);
  RunConfig config;

  const auto add_params = [&](CLI::App* sub) {
    sub->add_option("--a", config.a, "group parameter a > 0");
    sub->add_option("--b", config.b, "group parameter b != 0");
    sub->add_option("--n", config.n, "subdivision n >= 2 (b = a log2 n)")->check(CLI::Range(2, 1000000));
    sub->add_flag("--neg-b", config.neg_b, "negate b (Heintze group)");
  };
  const auto add_sequence = [&](CLI::App* sub) {
    sub->add_option("--seq", config.seq, "row decoration: morse or oxtoby");
    sub->add_option("--oxtoby-blocks", config.oxtoby_blocks, "Oxtoby block lengths")->delimiter(',');
  };
  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", config.format, "output format");
    sub->add_option("--out", config.out, "output file (default stdout)");
  };

  auto* seq = app.add_subcommand("seq", "print a window of a row sequence");
  add_sequence(seq);
  add_output(seq);
  seq->add_option("--from", config.first, "first index");
  seq->add_option("--to", config.last, "last index");
  seq->add_option("--word-len", config.word_len, "report the recurrence gap of words of this length");
  seq->add_option("--bound", config.bound, "search bound for --word-len");

  auto* hyper = app.add_subcommand("hyper", "half-plane tiling patch (json or svg)");
  add_sequence(hyper);
  add_output(hyper);
  hyper->add_option("--radius", config.radius, "patch radius");
  hyper->add_option("--center", config.center, "center tile i,j")->delimiter(',');

  auto* tile = app.add_subcommand("tile", "decorated patch json or slice svg");
  add_params(tile);
  add_sequence(tile);
  add_output(tile);
  tile->add_option("--radius", config.radius, "patch radius");
  tile->add_option("--center", config.center, "center tile i,j,k")->delimiter(',');
  tile->add_option("--slice", config.slice, "svg slice: x=<value>, y=<value> or z=<value in units of L>");
  tile->add_option("--rows", config.rows, "svg: draw rows -R..R");
  tile->add_option("--x-extent", config.x_extent, "svg: extent of the free coordinates")->check(CLI::PositiveNumber);

  auto* hull = app.add_subcommand("hull", "orbit graphs and invariant-measure certificates");
  add_params(hull);
  add_sequence(hull);
  add_output(hull);
  hull->add_option("--mode", config.mode, "orbit or lp");
  hull->add_option("--depth", config.depth, "lp: cylinder depth");
  hull->add_option("--steps", config.steps, "orbit: number of steps");
  hull->add_option("--precision", config.precision, "orbit: digits of the start code");
  hull->add_option("--center", config.center, "orbit: start tile i,j,k")->delimiter(',');

  auto* measure = app.add_subcommand("measure", "modular function and harmonicity reports");
  add_params(measure);
  add_output(measure);
  measure->add_option("--case", config.measure_case, "pushforward, harmonic or modular")->required();
  measure->add_option("--g0", config.g0, "translation x,y,z")->delimiter(',');
  measure->add_option("--trials", config.trials, "Monte Carlo samples per estimate");
  measure->add_option("--seed", config.seed, "PRNG seed");
  measure->add_option("--step", config.h, "finite-difference step");

  auto* verify = app.add_subcommand("verify", "run the property suite");
  add_output(verify);
  verify->add_option("--only", config.only, "restrict to one module");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    config.subcommand = app.get_subcommands().front()->get_name();
    if (config.subcommand == "seq") return cmd_seq(config);
    if (config.subcommand == "hyper") return cmd_hyper(config);
    if (config.subcommand == "tile") return cmd_tile(config);
    if (config.subcommand == "hull") return cmd_hull(config);
    if (config.subcommand == "measure") return cmd_measure(config);
    return cmd_verify(config);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NotFaceToFace& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotFaceToFace;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
