#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xorst/jordan.hpp"
#include "xorst/verdict.hpp"

namespace xorst {

struct QuadformProjection {
  VecC z;           // unit vector in the top eigenspace
  double distance;  // ||z - y||
  double bound;     // sqrt(2 (Q(z) - Q(y)) / (h1 - h2))
};

/// Normalized projection of the unit vector y onto the top eigenspace of
/// the Hermitian H, with Q(v) = <v, H v>. H needs two distinct eigenvalues.
QuadformProjection quadform_project(const MatC& H, const VecC& y);

struct NearMaximumReport {
  double C3 = 0.0;      // max ||y - z||_inf / sqrt(Z(z) - Z(y))
  int samples = 0;      // samples outside the exclusion ball
  int violations = 0;   // samples with Z(y) >= Z(z) away from z
};

/// Samples the sign quadrant of the normalized witness (theta_0 free,
/// every other angle in [0, pi]) of the normalized game.
NearMaximumReport near_maximum_check(const XorGame& game, const Verdict& verdict, int samples, Rng& rng);

enum class StrategyClass { T, S, Qubit, Canonical };

std::string to_string(StrategyClass c);
StrategyClass strategy_class_from_string(const std::string& s);

struct RobustnessSample {
  double target;
  double eps;
  double distance;
};

struct EnvelopeFit {
  double C = 0.0;
  std::optional<double> slope;
  int bins = 0;
};

/// C = max distance / sqrt(eps); slope of log(bin max distance) against
/// log(eps) over half-decade bins, absent with fewer than three bins.
EnvelopeFit fit_envelope(const std::vector<RobustnessSample>& samples);

struct RobustnessConfig {
  StrategyClass cls = StrategyClass::T;
  std::vector<double> eps_targets{1e-4, 1e-3, 1e-2, 1e-1};
  int samples_per_eps = 200;
  std::uint64_t seed = 1;
  int max_attempts_per_target = 100000;
  double band = 0.2;  // accepted eps within (1 +- band) * target
  /// Junk blocks per player for the canonical class.
  int junk_blocks = 2;
};

struct RobustnessCertificate {
  StrategyClass cls = StrategyClass::T;
  std::uint64_t seed = 0;
  double q_f = 0.0;
  double q_f_prime = 0.0;
  double K2 = 0.0;
  std::vector<double> eps_targets;
  std::vector<RobustnessSample> samples;
  double fitted_C = 0.0;
  std::optional<double> slope;
  /// max over samples of distance - fitted_C * sqrt(eps).
  double max_violation = 0.0;
  std::vector<std::string> warnings;
};

/// Samples near-optimal strategies of class `cls` at each eps target and
/// records their distance to the ideal strategy. Throws PreconditionError
/// unless the game is a robust self-test.
RobustnessCertificate run_robustness_experiment(const XorGame& game, const RobustnessConfig& config,
                                                const Verdict* verdict = nullptr);

/// Columns eps, distance, bound_C_sqrt_eps.
std::string certificate_csv(const RobustnessCertificate& cert);

}  // namespace xorst
