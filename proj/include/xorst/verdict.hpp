#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xorst/optimizer.hpp"

namespace xorst {

struct VerdictConfig {
  OptimizerConfig optimizer;
  /// Distance from pi*Z required of every spatial angle of a witness.
  double angle_tol = 1e-6;
  /// Wrapped sup-distance under which two maxima are identified (up to sign).
  double equivalence_tol = 1e-6;
  /// Relative threshold below which a Hessian eigenvalue counts as zero.
  double singular_tol = 1e-6;
};

/// Index of the first maximum whose spatial angles all avoid pi*Z, if any.
std::optional<std::size_t> check_condition_A(const MaximaSet& maxima, double tol = 1e-6);

/// Every maximum is within `tol` of `witness` or of `-witness`.
bool check_condition_B(const MaximaSet& maxima, const TorusPoint& witness, double tol = 1e-6);

/// Every maximum has a Hessian whose smallest |eigenvalue| exceeds
/// tol * max(1, largest |eigenvalue|). A degenerate maxima set fails.
bool check_condition_C(const MaximaSet& maxima, double tol = 1e-6);

/// p ~ q or p ~ -q in wrapped sup-distance.
bool equivalent_maxima(const TorusPoint& p, const TorusPoint& q, double tol = 1e-6);

struct Verdict {
  bool condition_A = false;
  bool condition_B = false;
  bool condition_C = false;
  bool is_self_test = false;
  bool is_robust_self_test = false;
  double q_f = 0.0;
  /// Present whenever the game is a self-test.
  std::optional<double> q_f_prime;
  /// Present exactly when the game is a robust self-test.
  std::optional<double> K2;
  std::optional<TorusPoint> witness;
  /// Transform taking the witness into the positive quadrant with
  /// theta_0 in [0, pi).
  std::optional<GameTransform> normalization;
  std::optional<TorusPoint> normalized_witness;
  /// First failing condition ("condition A", ...), empty on success.
  std::string reason;
  std::vector<std::string> notes;
  MaximaSet maxima;
};

Verdict classify(const XorGame& game, const VerdictConfig& config = {});

/// Transform sending `witness` (all spatial angles off pi*Z) to a point with
/// every spatial angle in (0, pi) and theta_0 in [0, pi).
GameTransform normalizing_transform(const TorusPoint& witness);

}  // namespace xorst
