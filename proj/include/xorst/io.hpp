#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xorst/ghz_device.hpp"
#include "xorst/jordan.hpp"
#include "xorst/robustness.hpp"
#include "xorst/verdict.hpp"

namespace xorst {

using nlohmann::json;

// Complex numbers are [re, im]; matrices are arrays of rows.

void to_json(json& j, const XorGame& g);
XorGame game_from_json(const json& j);
XorGame load_game(const std::filesystem::path& path);

json point_to_json(const TorusPoint& p);
TorusPoint point_from_json(const json& j);

json complex_to_json(cd z);
cd complex_from_json(const json& j);
json matrix_to_json(const MatC& m);
MatC matrix_from_json(const json& j);
json vector_to_json(const VecC& v);
VecC vector_from_json(const json& j);

/// {"dim": d, "X1": [[...]], "X2": [[...]]}
InvolutionPair pair_from_json(const json& j);
json pair_to_json(const InvolutionPair& p);
json decomposition_to_json(const BlockDecomposition& bd);

/// {"state": [...], "measurements": [[M0, M1], ...]}
QubitStrategy strategy_from_json(const json& j);
json strategy_to_json(const QubitStrategy& s);

/// {"c": [8 complex], "lambda": z, "gamma": z, "phi": z}
Qubit222Device device_from_json(const json& j);
json device_to_json(const Qubit222Device& d);

void to_json(json& j, const CriticalPoint& c);
void from_json(const json& j, CriticalPoint& c);
void to_json(json& j, const MaximaSet& m);
void from_json(const json& j, MaximaSet& m);
void to_json(json& j, const Verdict& v);
void from_json(const json& j, Verdict& v);
void to_json(json& j, const RobustnessCertificate& c);
void from_json(const json& j, RobustnessCertificate& c);
void to_json(json& j, const OptimizerConfig& c);

struct AnalysisReport {
  std::string tool_version;
  std::string input_digest;
  std::uint64_t seed = 0;
  json config;
  Verdict verdict;
  std::optional<RobustnessCertificate> robustness;
  std::map<std::string, double> timings_ms;
  std::vector<std::string> warnings;
};

void to_json(json& j, const AnalysisReport& r);
void from_json(const json& j, AnalysisReport& r);

/// "fnv1a64:" followed by 16 hex digits.
std::string content_digest(const std::string& bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace xorst
