#pragma once

#include <array>
#include <vector>

#include "xorst/game.hpp"
#include "xorst/optimizer.hpp"

namespace xorst {

/// Raised when a qubit measurement pair contains a scalar (+-identity)
/// observable; such a pair has no unitarily equivalent qubit canonical form.
/// jordan::to_canonical_form handles these by embedding.
class ScalarMeasurementError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Strategy on an arbitrary product space: player k acts on dims[k],
/// player 1 being the most significant tensor factor.
struct GeneralStrategy {
  std::vector<int> dims;
  VecC state;
  /// measurements[k][i] is player k+1's +-1 observable on input i.
  std::vector<std::array<MatC, 2>> measurements;

  int players() const { return static_cast<int>(dims.size()); }
  void validate(double tol = 1e-9) const;
};

struct QubitStrategy {
  VecC state;  // 2^n amplitudes
  std::vector<std::array<Eigen::Matrix2cd, 2>> measurements;

  int players() const { return static_cast<int>(measurements.size()); }
  void validate(double tol = 1e-9) const;
  GeneralStrategy to_general() const;
};

/// Ideal strategy T(theta): state (|0..0> + e^{i theta_0}|1..1>)/sqrt 2,
/// observables sigma_x on input 0 and [[0, e^{i theta_j}], [e^{-i theta_j}, 0]]
/// on input 1.
QubitStrategy make_T_strategy(const TorusPoint& angles);

/// M|psi> for M = sum_i f(i) (x)_k M_k^{(i_k)}.
VecC apply_game_operator(const XorGame& game, const GeneralStrategy& s, const VecC& v);

/// <psi|M|psi>, including the (ideally zero) imaginary part.
cd expectation(const XorGame& game, const GeneralStrategy& s);

double score(const XorGame& game, const GeneralStrategy& s);
double score(const XorGame& game, const QubitStrategy& s);

/// Dense game operator; refuses n > 10.
MatC build_game_operator(const XorGame& game, const QubitStrategy& s);

/// Entry a is M[a, complement(a)] for the T-measurements at `angles`,
/// which equals P_f(e^{i (-1)^{a_k} theta_k}). theta_0 is ignored.
std::vector<cd> reverse_diagonal_entries(const XorGame& game, const TorusPoint& angles);

/// max(||psi_1 - psi_2||, max over players and inputs of the operator-norm
/// difference of the observables).
double strategy_distance(const QubitStrategy& a, const QubitStrategy& b);

/// Qubit strategy in canonical class: input-0 observable sigma_x,
/// input-1 observable antidiag(e^{i theta}, e^{-i theta}) with theta in
/// [0, pi], and <0..0|psi> real and non-negative.
struct SClassStrategy {
  QubitStrategy strategy;
  std::vector<double> thetas;
};

SClassStrategy make_S_strategy(const std::vector<double>& thetas, const VecC& state);

struct QubitCanonicalForm {
  SClassStrategy canonical;
  /// canonical = (x)_k U_k applied to the input, times global_phase.
  std::vector<Eigen::Matrix2cd> unitaries;
  cd global_phase{1.0, 0.0};
};

QubitCanonicalForm canonicalize_qubit_strategy(const QubitStrategy& s);

struct ScoreTerm {
  std::size_t index;  // i with i_1 = 0
  double weight;      // 2 r_i r_{~i}
  double z_value;     // Z_f(t_{~i} - t_i, (-1)^{i_k} theta_k)
};

/// score = sum weight * z_value.
std::vector<ScoreTerm> s_score_decomposition(const XorGame& game, const SClassStrategy& s);

enum class PerturbMode { AnglesOnly, AnglesAndState };

/// T(angles + N(0, sigma^2)); with AnglesAndState the state also gets a
/// tangent kick of norm sigma before renormalization.
QubitStrategy perturb_T(const TorusPoint& angles, double sigma, Rng& rng, PerturbMode mode);

/// Min over the maxima (and their negatives) of the distance between the
/// canonical forms, optimizing the global phase of the state.
double distance_to_optimal(const QubitStrategy& s, const MaximaSet& maxima);

}  // namespace xorst
