#include "xorst/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "xorst/io.hpp"

namespace xorst {

namespace {

namespace fs = std::filesystem;

struct GameSource {
  std::string path;
  std::optional<double> alpha;
};

struct Loaded {
  XorGame game;
  std::string digest;
};

fs::path resolve_data_file(const std::string& name, const char* subdir) {
  fs::path p(name);
  if (fs::exists(p)) return p;
  if (!p.has_parent_path()) {
    // bare names resolve against the bundled data, with or without ".json"
    const fs::path dir = fs::path(XORST_DATA_DIR) / subdir;
    for (const fs::path& c : {dir / p, dir / (name + ".json")})
      if (fs::exists(c)) return c;
  }
  throw ValidationError("cannot read " + name);
}

Loaded load_source(const GameSource& src) {
  if (src.alpha) {
    XorGame g = XorGame::h_alpha(*src.alpha);
    return {g, content_digest(json(g).dump())};
  }
  if (src.path.empty()) throw ValidationError("either --game or --alpha is required");
  const fs::path p = resolve_data_file(src.path, "games");
  const std::string text = read_file(p);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
  try {
    return {game_from_json(j), content_digest(text)};
  } catch (const ValidationError& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

json load_json_file(const std::string& name, const char* subdir) {
  const fs::path p = resolve_data_file(name, subdir);
  try {
    return json::parse(read_file(p));
  } catch (const json::parse_error& e) {
    throw ValidationError(p.string() + ": " + e.what());
  }
}

void emit(const std::string& text, const std::string& output, std::ostream& out) {
  if (output.empty() || output == "-") {
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    return;
  }
  std::ofstream f(output, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + output);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct AnalyzeOptions {
  GameSource source;
  int grid_points = OptimizerConfig{}.grid_points_per_dim;
  int starts = -1;
  std::uint64_t seed = OptimizerConfig{}.rng_seed;
  double tol = VerdictConfig{}.equivalence_tol;
  bool strict = false;
  std::string output;
};

VerdictConfig verdict_config(const AnalyzeOptions& o) {
  VerdictConfig vc;
  vc.optimizer.grid_points_per_dim = o.grid_points;
  vc.optimizer.random_starts = o.starts;
  vc.optimizer.rng_seed = o.seed;
  vc.angle_tol = o.tol;
  vc.equivalence_tol = o.tol;
  vc.optimizer.dedup_angle_tol = o.tol;
  vc.optimizer.validate();
  return vc;
}

json config_json(const VerdictConfig& vc) {
  return json{{"optimizer", vc.optimizer},
              {"angle_tol", vc.angle_tol},
              {"equivalence_tol", vc.equivalence_tol},
              {"singular_tol", vc.singular_tol}};
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded in = load_source(o.source);
  const VerdictConfig vc = verdict_config(o);
  AnalysisReport r;
  r.tool_version = XORST_VERSION;
  r.input_digest = in.digest;
  r.seed = o.seed;
  r.config = config_json(vc);
  r.config["game"] = in.game;
  r.verdict = classify(in.game, vc);
  r.warnings = r.verdict.maxima.warnings;
  r.timings_ms["classify"] = elapsed_ms(start);
  emit(json(r).dump(2), o.output, out);
  return (o.strict && !r.warnings.empty()) ? kExitStrictWarning : kExitOk;
}

struct RobustnessOptions {
  GameSource source;
  std::string cls = "t";
  double eps_min = 1e-4;
  double eps_max = 1e-1;
  int eps_steps = 4;
  int samples = 200;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string output;
  bool strict = false;
};

std::vector<double> log_grid(double lo, double hi, int steps) {
  if (!(lo > 0) || !(hi >= lo) || steps < 1) throw ValidationError("eps grid needs 0 < eps-min <= eps-max and steps >= 1");
  if (steps == 1) return {lo};
  std::vector<double> g(steps);
  for (int k = 0; k < steps; ++k) g[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (steps - 1));
  return g;
}

int cmd_robustness(const RobustnessOptions& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded in = load_source(o.source);
  RobustnessConfig rc;
  rc.cls = strategy_class_from_string(o.cls);
  rc.eps_targets = log_grid(o.eps_min, o.eps_max, o.eps_steps);
  if (o.samples < 1) throw ValidationError("--samples must be positive");
  rc.samples_per_eps = o.samples;
  rc.seed = o.seed;

  const Verdict v = classify(in.game);
  if (!v.is_robust_self_test) {
    err << "error: game is not a robust self-test (" << v.reason << ")\n";
    emit(json{{"error", "not a robust self-test"}, {"verdict", v}}.dump(2), "", out);
    return kExitPrecondition;
  }
  const RobustnessCertificate cert = run_robustness_experiment(in.game, rc, &v);

  AnalysisReport r;
  r.tool_version = XORST_VERSION;
  r.input_digest = in.digest;
  r.seed = o.seed;
  r.config = json{{"class", o.cls},
                  {"eps_targets", rc.eps_targets},
                  {"samples_per_eps", rc.samples_per_eps},
                  {"band", rc.band},
                  {"game", in.game}};
  r.verdict = v;
  r.robustness = cert;
  r.warnings = v.maxima.warnings;
  r.warnings.insert(r.warnings.end(), cert.warnings.begin(), cert.warnings.end());
  r.timings_ms["total"] = elapsed_ms(start);

  const std::string csv = certificate_csv(cert);
  const std::string js = json(r).dump(2);
  if (o.output.empty()) {
    emit(o.format == "csv" ? csv : js, "", out);
  } else {
    emit(csv, o.output + ".csv", out);
    emit(js, o.output + ".json", out);
  }
  return (o.strict && !r.warnings.empty()) ? kExitStrictWarning : kExitOk;
}

int cmd_jordan(const std::string& file, const std::string& output, std::ostream& out) {
  const InvolutionPair pair = pair_from_json(load_json_file(file, "matrices"));
  const BlockDecomposition bd = block_decompose(pair);
  json j = decomposition_to_json(bd);
  j["version"] = XORST_VERSION;
  j["dim"] = pair.dim();
  j["thetas"] = bd.thetas();
  emit(j.dump(2), output, out);
  return kExitOk;
}

json device_report(const Qubit222Device& d) {
  const PhaseBoundReport ph = check_phase_bounds(d);
  const StateBoundReport st = check_state_bounds(d);
  const PostStateBoundReport ps = check_post_state_bound(d);
  std::vector<double> phase_slack;
  for (double l : ph.lhs) phase_slack.push_back(ph.rhs - l);
  return json{{"eps", ph.eps},
              {"pass_probability", pass_probability_formula(d)},
              {"pass_probability_direct", pass_probability_direct(d)},
              {"phase", {{"lhs", ph.lhs}, {"rhs", ph.rhs}, {"slack", phase_slack}, {"ok", ph.ok}}},
              {"state",
               {{"overlap", st.overlap},
                {"overlap_rhs", st.overlap_rhs},
                {"overlap_slack", st.overlap - st.overlap_rhs},
                {"distance2", st.distance2},
                {"distance2_rhs", st.distance2_rhs},
                {"distance2_slack", st.distance2_rhs - st.distance2},
                {"ok", st.ok}}},
              {"post_state", {{"value", ps.value}, {"rhs", ps.rhs}, {"slack", ps.rhs - ps.value}, {"ok", ps.ok}}},
              {"ok", ph.ok && st.ok && ps.ok}};
}

struct GhzOptions {
  std::string device;
  int random = 0;
  int canonical = 0;
  std::uint64_t seed = 7;
  std::string output;
};

int cmd_ghz(const GhzOptions& o, std::ostream& out) {
  if (!o.device.empty()) {
    const Qubit222Device d = device_from_json(load_json_file(o.device, "devices"));
    json j = device_report(d);
    j["version"] = XORST_VERSION;
    emit(j.dump(2), o.output, out);
    return j["ok"].get<bool>() ? kExitOk : kExitBoundViolated;
  }
  if (o.random <= 0 && o.canonical <= 0) throw ValidationError("ghz needs --device FILE or --random N");

  Rng rng(o.seed);
  int violations = 0;
  double worst_formula_gap = 0.0;
  double min_phase = INFINITY, min_overlap = INFINITY, min_dist = INFINITY, min_post = INFINITY;
  for (int k = 0; k < o.random; ++k) {
    const Qubit222Device d = random_device(rng);
    worst_formula_gap = std::max(worst_formula_gap, std::abs(pass_probability_formula(d) - pass_probability_direct(d)));
    const PhaseBoundReport ph = check_phase_bounds(d);
    const StateBoundReport st = check_state_bounds(d);
    const PostStateBoundReport ps = check_post_state_bound(d);
    for (double l : ph.lhs) min_phase = std::min(min_phase, ph.rhs - l);
    min_overlap = std::min(min_overlap, st.overlap - st.overlap_rhs);
    min_dist = std::min(min_dist, st.distance2_rhs - st.distance2);
    min_post = std::min(min_post, ps.rhs - ps.value);
    violations += !(ph.ok && st.ok && ps.ok);
  }
  double min600 = INFINITY, min2400 = INFINITY;
  for (int k = 0; k < o.canonical; ++k) {
    const EntangledBoundReport eb = check_entangled_bound(random_canonical_device(rng));
    min600 = std::min(min600, 600 * eb.eps - eb.bound600);
    min2400 = std::min(min2400, 2400 * eb.eps - eb.bound2400);
    violations += !eb.ok;
  }
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j{{"version", XORST_VERSION},
         {"seed", o.seed},
         {"devices", o.random},
         {"canonical_devices", o.canonical},
         {"violations", violations},
         {"max_formula_gap", worst_formula_gap},
         {"min_slack",
          {{"phase_16eps", finite_or_null(min_phase)},
           {"overlap_1m7eps", finite_or_null(min_overlap)},
           {"state_14eps", finite_or_null(min_dist)},
           {"post_150eps", finite_or_null(min_post)},
           {"trace_600eps", finite_or_null(min600)},
           {"trace_2400eps", finite_or_null(min2400)}}}};
  emit(j.dump(2), o.output, out);
  return violations == 0 ? kExitOk : kExitBoundViolated;
}

void add_game_options(CLI::App* cmd, GameSource& src) {
  auto* g = cmd->add_option("--game", src.path, "Game file (JSON with players and table)");
  auto* a = cmd->add_option("--alpha", src.alpha, "Use the two-player game h_alpha instead of a file");
  g->excludes(a);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-testing analysis of binary nonlocal XOR games", "xorst"};
  app.set_version_flag("--version", std::string(XORST_VERSION));
  app.require_subcommand(1);

  AnalyzeOptions ao;
  auto* analyze = app.add_subcommand("analyze", "Classify a game as a (robust) self-test");
  add_game_options(analyze, ao.source);
  analyze->add_option("--grid-points", ao.grid_points, "Grid seeds per angle")->check(CLI::PositiveNumber);
  analyze->add_option("--starts", ao.starts, "Random Newton starts (-1: 10(n+1))");
  analyze->add_option("--seed", ao.seed, "RNG seed");
  analyze->add_option("--tol", ao.tol, "Angle tolerance for identifying maxima")->check(CLI::PositiveNumber);
  analyze->add_flag("--strict", ao.strict, "Exit 3 on optimizer warnings");
  analyze->add_option("--output", ao.output, "Write the report here instead of stdout");

  RobustnessOptions ro;
  auto* robust = app.add_subcommand("robustness", "Sample near-optimal strategies and fit the sqrt(eps) envelope");
  add_game_options(robust, ro.source);
  robust->add_option("--class", ro.cls, "Strategy class")->check(CLI::IsMember({"t", "s", "qubit", "canonical"}));
  robust->add_option("--eps-min", ro.eps_min, "Smallest eps target");
  robust->add_option("--eps-max", ro.eps_max, "Largest eps target");
  robust->add_option("--eps-steps", ro.eps_steps, "Number of log-spaced eps targets");
  robust->add_option("--samples", ro.samples, "Samples per eps target");
  robust->add_option("--seed", ro.seed, "RNG seed");
  robust->add_option("--format", ro.format, "Stdout format")->check(CLI::IsMember({"json", "csv"}));
  robust->add_option("--output", ro.output, "Write PREFIX.csv and PREFIX.json");
  robust->add_flag("--strict", ro.strict, "Exit 3 on sampling warnings");

  std::string matrix_file, jordan_output;
  auto* jordan = app.add_subcommand("jordan", "Block-decompose a pair of Hermitian involutions");
  jordan->add_option("--matrix,matrix", matrix_file, "Matrix pair file")->required();
  jordan->add_option("--output", jordan_output, "Write the report here instead of stdout");

  GhzOptions go;
  auto* ghz = app.add_subcommand("ghz", "Check the GHZ-test device bounds");
  auto* dev = ghz->add_option("--device", go.device, "Device file");
  auto* rnd = ghz->add_option("--random", go.random, "Number of random 2x2x2 devices");
  auto* can = ghz->add_option("--canonical", go.canonical, "Number of random canonical devices with environment");
  dev->excludes(rnd)->excludes(can);
  ghz->add_option("--seed", go.seed, "RNG seed");
  ghz->add_option("--output", go.output, "Write the report here instead of stdout");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*analyze) return cmd_analyze(ao, out);
    if (*robust) return cmd_robustness(ro, out, err);
    if (*jordan) return cmd_jordan(matrix_file, jordan_output, out);
    if (*ghz) return cmd_ghz(go, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace xorst
