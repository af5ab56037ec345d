#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "xorst/cli.hpp"
#include "xorst/io.hpp"

using namespace xorst;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "xorst");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path data(const std::string& rel) { return fs::path(XORST_TEST_DATA_DIR) / rel; }

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("xorst_test_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(GameJson, ParsesAndRejects) {
  EXPECT_EQ(game_from_json(json::parse(R"({"players": 2, "table": [1, 1, 1, -1]})")), XorGame::chsh());
  EXPECT_THROW(game_from_json(json::parse(R"({"players": 2, "table": [1, 1, 1]})")), ValidationError);
  EXPECT_THROW(game_from_json(json::parse(R"({"players": 2})")), ValidationError);
  EXPECT_THROW(game_from_json(json::parse(R"({"players": 1, "table": [1, "x"]})")), ValidationError);
  EXPECT_EQ(load_game(data("games/ghz3.json")), XorGame::ghz3());
}

TEST(AnalysisReport, RoundTripsLosslessly) {
  AnalysisReport r;
  r.tool_version = XORST_VERSION;
  r.input_digest = content_digest("abc");
  r.seed = 42;
  r.config = json{{"k", 1}};
  r.verdict = classify(XorGame::chsh());
  RobustnessConfig rc;
  rc.samples_per_eps = 3;
  rc.eps_targets = {1e-3, 1e-2};
  r.robustness = run_robustness_experiment(XorGame::chsh(), rc, &r.verdict);
  r.timings_ms["x"] = 1.25;
  r.warnings = {"w"};
  const std::string text = json(r).dump();
  const AnalysisReport back = json::parse(text).get<AnalysisReport>();
  EXPECT_EQ(json(back).dump(), text);
  EXPECT_EQ(back.verdict.maxima.maxima[0].point.theta, r.verdict.maxima.maxima[0].point.theta);
  EXPECT_EQ(*back.verdict.K2, *r.verdict.K2);
  EXPECT_EQ(back.robustness->samples.back().distance, r.robustness->samples.back().distance);
}

TEST(Digest, Fnv1a) {
  EXPECT_EQ(content_digest(""), "fnv1a64:cbf29ce484222325");
  EXPECT_EQ(content_digest("a"), "fnv1a64:af63dc4c8601ec8c");
}

TEST(StrategyJson, RoundTrip) {
  const QubitStrategy s = make_T_strategy({0.1, 0.2, 0.3});
  const QubitStrategy b = strategy_from_json(strategy_to_json(s));
  EXPECT_EQ(strategy_distance(s, b), 0.0);
}

TEST(DeviceJson, RoundTripAndValidation) {
  const Qubit222Device d = ideal_device();
  const Qubit222Device b = device_from_json(device_to_json(d));
  for (int k = 0; k < 8; ++k) EXPECT_EQ(b.c[k], d.c[k]);
  json j = device_to_json(d);
  j["lambda"] = json::array({0, -1});
  EXPECT_THROW(device_from_json(j), ValidationError);
}

TEST(Cli, AnalyzeChsh) {
  const CliRun r = run({"analyze", "--game", data("games/chsh.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["verdict"]["is_robust_self_test"].get<bool>());
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), OptimizerConfig{}.rng_seed);
  EXPECT_TRUE(j.contains("config"));
  EXPECT_EQ(j["input_digest"].get<std::string>().substr(0, 8), "fnv1a64:");
}

TEST(Cli, AnalyzeConstantGame) {
  const CliRun r = run({"analyze", "--game", data("games/const1.json").string()});
  ASSERT_EQ(r.code, kExitOk);
  const json j = json::parse(r.out);
  EXPECT_FALSE(j["verdict"]["is_self_test"].get<bool>());
  EXPECT_EQ(j["verdict"]["reason"], "condition A");
}

TEST(Cli, AnalyzeAlphaAndBundledName) {
  const CliRun r = run({"analyze", "--alpha", "2"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NEAR(json::parse(r.out)["verdict"]["q_f"].get<double>(), 2 * std::sqrt(5.0), 1e-9);
  EXPECT_EQ(run({"analyze", "--game", "chsh.json"}).code, kExitOk);
}

TEST(Cli, ValidationErrors) {
  EXPECT_EQ(run({"analyze", "--game", "/nonexistent/game.json"}).code, kExitValidation);
  const CliRun bad = run({"analyze", "--game", temp_file("bad.json", "{\"players\": 2, \"table\": [1, 2,]}").string()});
  EXPECT_EQ(bad.code, kExitValidation);
  EXPECT_NE(bad.err.find("line"), std::string::npos);
  const CliRun len = run({"analyze", "--game", temp_file("len.json", R"({"players": 2, "table": [1]})").string()});
  EXPECT_EQ(len.code, kExitValidation);
  EXPECT_NE(len.err.find("table length"), std::string::npos);
  EXPECT_EQ(run({"analyze"}).code, kExitValidation);
  EXPECT_EQ(run({"bogus"}).code, kExitValidation);
  EXPECT_EQ(run({"robustness", "--game", "chsh.json", "--class", "zzz"}).code, kExitValidation);
  EXPECT_EQ(run({"analyze", "--game", "chsh.json", "--grid-points", "2"}).code, kExitValidation);
}

TEST(Cli, Help) { EXPECT_EQ(run({"--help"}).code, kExitOk); }

TEST(Cli, RobustnessGateAndDeterminism) {
  const CliRun gate = run({"robustness", "--game", data("games/const1.json").string()});
  EXPECT_EQ(gate.code, kExitPrecondition);
  EXPECT_TRUE(json::parse(gate.out).contains("verdict"));

  const std::vector<std::string> args{"robustness", "--game", "chsh.json", "--samples", "5", "--eps-steps", "2",
                                      "--seed", "3", "--format", "csv"};
  const CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("eps,distance,bound_C_sqrt_eps", 0), 0u);

  const fs::path prefix = fs::temp_directory_path() / "xorst_test_cert";
  const CliRun files = run({"robustness", "--game", "chsh.json", "--samples", "5", "--eps-steps", "2", "--output",
                         prefix.string()});
  ASSERT_EQ(files.code, kExitOk);
  EXPECT_TRUE(fs::exists(prefix.string() + ".csv"));
  const json cert = json::parse(read_file(prefix.string() + ".json"));
  EXPECT_EQ(cert["robustness"]["samples"].size(), 10u);
}

TEST(Cli, Jordan) {
  const CliRun xy = run({"jordan", data("matrices/sigma_xy.json").string()});
  ASSERT_EQ(xy.code, kExitOk) << xy.err;
  const json j = json::parse(xy.out);
  ASSERT_EQ(j["blocks"].size(), 1u);
  EXPECT_NEAR(j["blocks"][0]["theta"].get<double>(), kPi / 2, 1e-12);
  EXPECT_LE(j["residual"].get<double>(), 1e-12);

  const CliRun scalar = run({"jordan", "--matrix", data("matrices/scalar_pair.json").string()});
  ASSERT_EQ(scalar.code, kExitOk);
  EXPECT_EQ(json::parse(scalar.out)["blocks"][0]["origin"], "embedded");

  const CliRun bad = run({"jordan", data("matrices/not_involution.json").string()});
  EXPECT_EQ(bad.code, kExitValidation);
  EXPECT_NE(bad.err.find("X1"), std::string::npos);
}

TEST(Cli, Ghz) {
  const CliRun ideal = run({"ghz", "--device", data("devices/ideal.json").string()});
  ASSERT_EQ(ideal.code, kExitOk);
  EXPECT_NEAR(json::parse(ideal.out)["eps"].get<double>(), 0.0, 1e-12);
  EXPECT_EQ(run({"ghz", "--device", data("devices/bad_phase.json").string()}).code, kExitValidation);
  const CliRun rnd = run({"ghz", "--random", "1000", "--seed", "7"});
  ASSERT_EQ(rnd.code, kExitOk);
  EXPECT_EQ(json::parse(rnd.out)["violations"].get<int>(), 0);
  EXPECT_EQ(run({"ghz"}).code, kExitValidation);
}
