#include "xorst/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xorst {

namespace {

template <class T>
T required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

double finite_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + " must be a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ValidationError(what + " is not finite");
  return x;
}

json optional_double(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::optional<double> read_optional_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

void to_json(json& j, const XorGame& g) { j = json{{"players", g.players()}, {"table", g.table()}}; }

XorGame game_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("game must be a JSON object");
  const int n = required<int>(j, "players");
  if (!j.contains("table") || !j.at("table").is_array()) throw ValidationError("game needs a 'table' array");
  std::vector<double> table;
  for (std::size_t i = 0; i < j.at("table").size(); ++i)
    table.push_back(finite_number(j.at("table")[i], "table entry " + std::to_string(i)));
  return XorGame(n, std::move(table));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

}  // namespace

XorGame load_game(const std::filesystem::path& path) {
  return game_from_json(parse_json(read_file(path), path.string()));
}

json point_to_json(const TorusPoint& p) { return json(std::vector<double>(p.theta.begin(), p.theta.end())); }

TorusPoint point_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return TorusPoint(Eigen::Map<const VecR>(v.data(), static_cast<Eigen::Index>(v.size())));
}

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("complex numbers are [re, im] pairs");
  return {finite_number(j[0], "real part"), finite_number(j[1], "imaginary part")};
}

json matrix_to_json(const MatC& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

MatC matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  MatC m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ValidationError("matrix rows have unequal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

json vector_to_json(const VecC& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

VecC vector_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("vector must be an array of [re, im] pairs");
  VecC v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i]);
  return v;
}

InvolutionPair pair_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("matrix file must be a JSON object");
  const int d = required<int>(j, "dim");
  InvolutionPair p{matrix_from_json(j.at("X1")), matrix_from_json(j.at("X2"))};
  if (p.X1.rows() != d || p.X1.cols() != d || p.X2.rows() != d || p.X2.cols() != d)
    throw ValidationError("matrix dimensions do not match 'dim'");
  p.validate();
  return p;
}

json pair_to_json(const InvolutionPair& p) {
  return json{{"dim", p.dim()}, {"X1", matrix_to_json(p.X1)}, {"X2", matrix_to_json(p.X2)}};
}

json decomposition_to_json(const BlockDecomposition& bd) {
  json blocks = json::array();
  for (const auto& b : bd.blocks) blocks.push_back({{"theta", b.theta}, {"origin", to_string(b.origin)}});
  return json{{"m", bd.m()},
              {"blocks", blocks},
              {"embedding", matrix_to_json(bd.embedding)},
              {"isometry_defect", bd.isometry_defect},
              {"residual", bd.residual}};
}

QubitStrategy strategy_from_json(const json& j) {
  if (!j.is_object() || !j.contains("state") || !j.contains("measurements"))
    throw ValidationError("strategy needs 'state' and 'measurements'");
  QubitStrategy s;
  s.state = vector_from_json(j.at("state"));
  for (const auto& pair : j.at("measurements")) {
    if (!pair.is_array() || pair.size() != 2) throw ValidationError("each player needs two observables");
    std::array<Eigen::Matrix2cd, 2> m;
    for (int i = 0; i < 2; ++i) {
      const MatC x = matrix_from_json(pair[i]);
      if (x.rows() != 2 || x.cols() != 2) throw ValidationError("qubit observables are 2x2");
      m[i] = x;
    }
    s.measurements.push_back(m);
  }
  s.validate();
  return s;
}

json strategy_to_json(const QubitStrategy& s) {
  json meas = json::array();
  for (const auto& m : s.measurements) meas.push_back({matrix_to_json(m[0]), matrix_to_json(m[1])});
  return json{{"state", vector_to_json(s.state)}, {"measurements", meas}};
}

Qubit222Device device_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("device must be a JSON object");
  Qubit222Device d;
  if (!j.contains("c") || !j.at("c").is_array() || j.at("c").size() != 8)
    throw ValidationError("device needs 8 amplitudes in 'c'");
  for (int k = 0; k < 8; ++k) d.c[k] = complex_from_json(j.at("c")[k]);
  for (const char* key : {"lambda", "gamma", "phi"})
    if (!j.contains(key)) throw ValidationError(std::string("device is missing '") + key + "'");
  d.lambda = complex_from_json(j.at("lambda"));
  d.gamma = complex_from_json(j.at("gamma"));
  d.phi = complex_from_json(j.at("phi"));
  d.validate();
  return d;
}

json device_to_json(const Qubit222Device& d) {
  json c = json::array();
  for (const cd& x : d.c) c.push_back(complex_to_json(x));
  return json{{"c", c},
              {"lambda", complex_to_json(d.lambda)},
              {"gamma", complex_to_json(d.gamma)},
              {"phi", complex_to_json(d.phi)}};
}

namespace {

json real_matrix_to_json(const MatR& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

MatR real_matrix_from_json(const json& j) {
  MatR m(j.size(), j.empty() ? 0 : j[0].size());
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

}  // namespace

void to_json(json& j, const CriticalPoint& c) {
  j = json{{"point", point_to_json(c.point)},
           {"value", c.value},
           {"gradient_norm", c.gradient_norm},
           {"hessian", real_matrix_to_json(c.hessian)},
           {"hessian_eigenvalues", std::vector<double>(c.hessian_eigenvalues.begin(), c.hessian_eigenvalues.end())}};
}

void from_json(const json& j, CriticalPoint& c) {
  c.point = point_from_json(j.at("point"));
  c.value = j.at("value").get<double>();
  c.gradient_norm = j.at("gradient_norm").get<double>();
  c.hessian = real_matrix_from_json(j.at("hessian"));
  const auto ev = j.at("hessian_eigenvalues").get<std::vector<double>>();
  c.hessian_eigenvalues = Eigen::Map<const VecR>(ev.data(), static_cast<Eigen::Index>(ev.size()));
}

void to_json(json& j, const MaximaSet& m) {
  j = json{{"q_f", m.q_f},
           {"maxima", m.maxima},
           {"converged_fraction", m.converged_fraction},
           {"seeds", m.seeds},
           {"degenerate", m.degenerate},
           {"warnings", m.warnings}};
}

void from_json(const json& j, MaximaSet& m) {
  m.q_f = j.at("q_f").get<double>();
  m.maxima = j.at("maxima").get<std::vector<CriticalPoint>>();
  m.converged_fraction = j.at("converged_fraction").get<double>();
  m.seeds = j.at("seeds").get<int>();
  m.degenerate = j.at("degenerate").get<bool>();
  m.warnings = j.at("warnings").get<std::vector<std::string>>();
}

void to_json(json& j, const Verdict& v) {
  j = json{{"condition_A", v.condition_A},
           {"condition_B", v.condition_B},
           {"condition_C", v.condition_C},
           {"is_self_test", v.is_self_test},
           {"is_robust_self_test", v.is_robust_self_test},
           {"q_f", v.q_f},
           {"q_f_prime", optional_double(v.q_f_prime)},
           {"K2", optional_double(v.K2)},
           {"witness", v.witness ? point_to_json(*v.witness) : json(nullptr)},
           {"normalized_witness", v.normalized_witness ? point_to_json(*v.normalized_witness) : json(nullptr)},
           {"normalization", v.normalization ? json{{"b0", v.normalization->b0}, {"b", v.normalization->b}}
                                             : json(nullptr)},
           {"reason", v.reason},
           {"notes", v.notes},
           {"maxima", v.maxima}};
}

void from_json(const json& j, Verdict& v) {
  v.condition_A = j.at("condition_A").get<bool>();
  v.condition_B = j.at("condition_B").get<bool>();
  v.condition_C = j.at("condition_C").get<bool>();
  v.is_self_test = j.at("is_self_test").get<bool>();
  v.is_robust_self_test = j.at("is_robust_self_test").get<bool>();
  v.q_f = j.at("q_f").get<double>();
  v.q_f_prime = read_optional_double(j, "q_f_prime");
  v.K2 = read_optional_double(j, "K2");
  v.witness.reset();
  v.normalized_witness.reset();
  v.normalization.reset();
  if (!j.at("witness").is_null()) v.witness = point_from_json(j.at("witness"));
  if (!j.at("normalized_witness").is_null()) v.normalized_witness = point_from_json(j.at("normalized_witness"));
  if (!j.at("normalization").is_null())
    v.normalization = GameTransform{j.at("normalization").at("b0").get<int>(),
                                    j.at("normalization").at("b").get<std::vector<int>>()};
  v.reason = j.at("reason").get<std::string>();
  v.notes = j.at("notes").get<std::vector<std::string>>();
  v.maxima = j.at("maxima").get<MaximaSet>();
}

void to_json(json& j, const RobustnessCertificate& c) {
  json samples = json::array();
  for (const auto& s : c.samples) samples.push_back({{"target", s.target}, {"eps", s.eps}, {"distance", s.distance}});
  j = json{{"class", to_string(c.cls)},
           {"seed", c.seed},
           {"q_f", c.q_f},
           {"q_f_prime", c.q_f_prime},
           {"K2", c.K2},
           {"eps_targets", c.eps_targets},
           {"samples", samples},
           {"fitted_C", c.fitted_C},
           {"slope", optional_double(c.slope)},
           {"max_violation", c.max_violation},
           {"warnings", c.warnings}};
}

void from_json(const json& j, RobustnessCertificate& c) {
  c.cls = strategy_class_from_string(j.at("class").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.q_f = j.at("q_f").get<double>();
  c.q_f_prime = j.at("q_f_prime").get<double>();
  c.K2 = j.at("K2").get<double>();
  c.eps_targets = j.at("eps_targets").get<std::vector<double>>();
  c.samples.clear();
  for (const auto& s : j.at("samples"))
    c.samples.push_back({s.at("target").get<double>(), s.at("eps").get<double>(), s.at("distance").get<double>()});
  c.fitted_C = j.at("fitted_C").get<double>();
  c.slope = read_optional_double(j, "slope");
  c.max_violation = j.at("max_violation").get<double>();
  c.warnings = j.at("warnings").get<std::vector<std::string>>();
}

void to_json(json& j, const OptimizerConfig& c) {
  j = json{{"grid_points_per_dim", c.grid_points_per_dim},
           {"newton_max_iters", c.newton_max_iters},
           {"gradient_tol", c.gradient_tol},
           {"dedup_angle_tol", c.dedup_angle_tol},
           {"global_value_tol", c.global_value_tol},
           {"rng_seed", c.rng_seed},
           {"random_starts", c.random_starts}};
}

void to_json(json& j, const AnalysisReport& r) {
  j = json{{"version", r.tool_version},
           {"input_digest", r.input_digest},
           {"seed", r.seed},
           {"config", r.config},
           {"verdict", r.verdict},
           {"robustness", r.robustness ? json(*r.robustness) : json(nullptr)},
           {"timings_ms", r.timings_ms},
           {"warnings", r.warnings}};
}

void from_json(const json& j, AnalysisReport& r) {
  r.tool_version = j.at("version").get<std::string>();
  r.input_digest = j.at("input_digest").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config = j.at("config");
  r.verdict = j.at("verdict").get<Verdict>();
  r.robustness.reset();
  if (!j.at("robustness").is_null()) r.robustness = j.at("robustness").get<RobustnessCertificate>();
  r.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
}

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

}  // namespace xorst
