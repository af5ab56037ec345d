#include "xorst/strategy.hpp"

#include <cmath>
#include <functional>

namespace xorst {

namespace {

void check_observable(const MatC& m, int dim, double tol, const std::string& where) {
  if (m.rows() != dim || m.cols() != dim) throw ValidationError(where + ": observable has the wrong size");
  if (involution_defect(m) > tol) throw ValidationError(where + ": observable is not a Hermitian involution");
}

std::int64_t product(const std::vector<int>& dims) {
  std::int64_t p = 1;
  for (int d : dims) p *= d;
  return p;
}

}  // namespace

void GeneralStrategy::validate(double tol) const {
  if (dims.empty() || measurements.size() != dims.size())
    throw ValidationError("strategy needs one measurement pair per player");
  for (int d : dims)
    if (d < 1) throw ValidationError("local dimensions must be positive");
  if (product(dims) > (std::int64_t{1} << 16)) throw SizeLimitError("strategy dimension exceeds 2^16");
  if (state.size() != product(dims)) throw ValidationError("state length does not match local dimensions");
  if (std::abs(state.norm() - 1.0) > tol) throw ValidationError("state is not normalized");
  for (std::size_t k = 0; k < dims.size(); ++k)
    for (int i = 0; i < 2; ++i)
      check_observable(measurements[k][i], dims[k], tol, "player " + std::to_string(k + 1));
}

GeneralStrategy QubitStrategy::to_general() const {
  GeneralStrategy g;
  g.dims.assign(measurements.size(), 2);
  g.state = state;
  for (const auto& m : measurements) g.measurements.push_back({MatC(m[0]), MatC(m[1])});
  return g;
}

void QubitStrategy::validate(double tol) const { to_general().validate(tol); }

QubitStrategy make_T_strategy(const TorusPoint& angles) {
  const int n = angles.players();
  if (n < 1 || n > kMaxPlayers) throw ValidationError("T strategy needs 1..12 players");
  QubitStrategy s;
  s.state = VecC::Zero(std::int64_t{1} << n);
  s.state(0) = 1.0 / std::sqrt(2.0);
  s.state(s.state.size() - 1) = std::polar(1.0 / std::sqrt(2.0), angles[0]);
  for (int k = 1; k <= n; ++k) s.measurements.push_back({pauli_x(), antidiag_phase(angles[k])});
  return s;
}

VecC apply_game_operator(const XorGame& game, const GeneralStrategy& s, const VecC& v) {
  const int n = game.players();
  if (s.players() != n) throw ValidationError("strategy and game disagree on the player count");
  VecC out = VecC::Zero(v.size());
  // Subtrees whose table entries are all zero are skipped.
  std::function<void(int, std::size_t, const VecC&)> rec = [&](int k, std::size_t prefix, const VecC& w) {
    if (k == n) {
      out += game[prefix] * w;
      return;
    }
    for (std::size_t b = 0; b < 2; ++b) {
      const std::size_t p = (prefix << 1) | b;
      const int rest = n - k - 1;
      bool nonzero = false;
      for (std::size_t t = p << rest; t < ((p + 1) << rest) && !nonzero; ++t) nonzero = game[t] != 0.0;
      if (nonzero) rec(k + 1, p, apply_local(w, s.dims, k, s.measurements[k][b]));
    }
  };
  rec(0, 0, v);
  return out;
}

cd expectation(const XorGame& game, const GeneralStrategy& s) {
  return s.state.dot(apply_game_operator(game, s, s.state));
}

double score(const XorGame& game, const GeneralStrategy& s) { return expectation(game, s).real(); }

double score(const XorGame& game, const QubitStrategy& s) { return score(game, s.to_general()); }

MatC build_game_operator(const XorGame& game, const QubitStrategy& s) {
  const int n = game.players();
  if (n > 10) throw SizeLimitError("dense game operator refused for n > 10");
  if (s.players() != n) throw ValidationError("strategy and game disagree on the player count");
  std::function<MatC(int, std::size_t)> rec = [&](int k, std::size_t prefix) -> MatC {
    if (k == n) return MatC::Constant(1, 1, game[prefix]);
    return MatC(kron(s.measurements[k][0], rec(k + 1, prefix << 1)) +
                kron(s.measurements[k][1], rec(k + 1, (prefix << 1) | 1)));
  };
  return rec(0, 0);
}

std::vector<cd> reverse_diagonal_entries(const XorGame& game, const TorusPoint& angles) {
  const int n = game.players();
  if (angles.players() != n) throw ValidationError("angles do not match the game");
  std::vector<cd> out(game.size());
  std::vector<cd> lambda(n);
  for (std::size_t a = 0; a < game.size(); ++a) {
    for (int k = 1; k <= n; ++k) lambda[k - 1] = std::polar(1.0, game.bit(a, k) ? -angles[k] : angles[k]);
    out[a] = eval_P(game, lambda);
  }
  return out;
}

double strategy_distance(const QubitStrategy& a, const QubitStrategy& b) {
  if (a.players() != b.players() || a.state.size() != b.state.size())
    throw ValidationError("strategies have different shapes");
  double d = (a.state - b.state).norm();
  for (int k = 0; k < a.players(); ++k)
    for (int i = 0; i < 2; ++i)
      d = std::max(d, spectral_norm(MatC(a.measurements[k][i] - b.measurements[k][i])));
  return d;
}

SClassStrategy make_S_strategy(const std::vector<double>& thetas, const VecC& state) {
  const int n = static_cast<int>(thetas.size());
  if (n < 1 || state.size() != (std::int64_t{1} << n)) throw ValidationError("S strategy shape mismatch");
  SClassStrategy s;
  s.thetas = thetas;
  s.strategy.state = state;
  for (double t : thetas) {
    if (t < 0 || t > kPi) throw ValidationError("S strategy angles must lie in [0, pi]");
    s.strategy.measurements.push_back({pauli_x(), antidiag_phase(t)});
  }
  if (std::abs(state(0).imag()) > 1e-12 || state(0).real() < -1e-12)
    throw ValidationError("S strategy state must have a real non-negative |0..0> amplitude");
  return s;
}

namespace {

bool is_scalar(const Eigen::Matrix2cd& m) {
  return std::abs(m(0, 1)) + std::abs(m(0, 0) - m(1, 1)) < 1e-9;
}

struct PlayerFrame {
  Eigen::Matrix2cd unitary;
  double theta;
};

// Unitary U with U X U^dag = sigma_x and U Y U^dag = antidiag(e^{i theta}),
// theta in [0, pi].
PlayerFrame canonical_frame(const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& y) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(x);
  const Eigen::Vector2cd em = es.eigenvectors().col(0);  // eigenvalue -1
  const Eigen::Vector2cd ep = es.eigenvectors().col(1);  // eigenvalue +1
  const double r2 = 1.0 / std::sqrt(2.0);
  Eigen::Vector2cd plus(r2, r2), minus(r2, -r2);
  Eigen::Matrix2cd u0 = plus * ep.adjoint() + minus * em.adjoint();
  const Eigen::Matrix2cd yp = u0 * y * u0.adjoint();
  // Bloch components of yp.
  const double nx = yp(0, 1).real();
  const double ny = -yp(0, 1).imag();
  const double nz = 0.5 * (yp(0, 0) - yp(1, 1)).real();
  // Rotate about x so that (ny, nz) -> (-r, 0).
  const double phi = kPi - std::atan2(nz, ny);
  Eigen::Matrix2cd rot = std::cos(phi / 2) * Eigen::Matrix2cd::Identity() - kI * std::sin(phi / 2) * pauli_x();
  const double r = std::hypot(ny, nz);
  return {rot * u0, std::atan2(r, nx)};
}

}  // namespace

QubitCanonicalForm canonicalize_qubit_strategy(const QubitStrategy& s) {
  s.validate();
  const int n = s.players();
  QubitCanonicalForm out;
  std::vector<double> thetas(n);
  VecC psi = s.state;
  std::vector<int> dims(n, 2);
  for (int k = 0; k < n; ++k) {
    const auto& [x, y] = s.measurements[k];
    if (is_scalar(x) || is_scalar(y))
      throw ScalarMeasurementError("player " + std::to_string(k + 1) +
                                   " has a scalar observable; use the general canonical form");
    const PlayerFrame f = canonical_frame(x, y);
    out.unitaries.push_back(f.unitary);
    thetas[k] = f.theta;
    psi = apply_local(psi, dims, k, f.unitary);
  }
  const double a0 = std::abs(psi(0));
  out.global_phase = a0 > 1e-15 ? std::conj(psi(0)) / a0 : cd(1.0);
  psi *= out.global_phase;
  psi(0) = cd(psi(0).real(), 0.0);
  out.canonical = make_S_strategy(thetas, psi);
  return out;
}

std::vector<ScoreTerm> s_score_decomposition(const XorGame& game, const SClassStrategy& s) {
  const int n = game.players();
  if (static_cast<int>(s.thetas.size()) != n) throw ValidationError("strategy and game disagree on the player count");
  const std::size_t full = game.size() - 1;
  std::vector<ScoreTerm> terms;
  for (std::size_t i = 0; i < game.size() / 2; ++i) {
    const std::size_t j = full ^ i;
    const cd gi = s.strategy.state(i), gj = s.strategy.state(j);
    TorusPoint p(VecR(n + 1));
    p.theta(0) = std::arg(gj) - std::arg(gi);
    for (int k = 1; k <= n; ++k) p.theta(k) = game.bit(i, k) ? -s.thetas[k - 1] : s.thetas[k - 1];
    terms.push_back({i, 2.0 * std::abs(gi) * std::abs(gj), eval_Z(game, p)});
  }
  return terms;
}

QubitStrategy perturb_T(const TorusPoint& angles, double sigma, Rng& rng, PerturbMode mode) {
  if (!(sigma >= 0)) throw ValidationError("sigma must be non-negative");
  std::normal_distribution<double> noise(0.0, sigma);
  TorusPoint p = angles;
  for (Eigen::Index k = 0; k < p.theta.size(); ++k) p.theta(k) += sigma > 0 ? noise(rng) : 0.0;
  QubitStrategy s = make_T_strategy(p);
  if (mode == PerturbMode::AnglesAndState && sigma > 0) {
    VecC t = complex_gaussian(static_cast<int>(s.state.size()), rng);
    t -= s.state.dot(t) * s.state;
    s.state += sigma * t / t.norm();
    s.state.normalize();
  }
  return s;
}

double distance_to_optimal(const QubitStrategy& s, const MaximaSet& maxima) {
  if (maxima.maxima.empty()) throw ValidationError("no maxima supplied");
  const SClassStrategy c = canonicalize_qubit_strategy(s).canonical;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : maxima.maxima) {
    for (const TorusPoint& p : {m.point, -m.point}) {
      const SClassStrategy ref = canonicalize_qubit_strategy(make_T_strategy(p)).canonical;
      // min over global phases of ||ref - e^{i phi} c||, formed directly to avoid sqrt(1 - overlap) cancellation
      const cd ov = c.strategy.state.dot(ref.strategy.state);
      const cd align = std::abs(ov) > 0 ? ov / std::abs(ov) : cd(1.0);
      double d = (ref.strategy.state - align * c.strategy.state).norm();
      for (int k = 0; k < s.players(); ++k)
        for (int i = 0; i < 2; ++i)
          d = std::max(d, spectral_norm(MatC(c.strategy.measurements[k][i] - ref.strategy.measurements[k][i])));
      best = std::min(best, d);
    }
  }
  return best;
}

}  // namespace xorst
