#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xorst/game.hpp"

namespace xorst {

struct OptimizerConfig {
  int grid_points_per_dim = 12;
  int newton_max_iters = 100;
  double gradient_tol = 1e-10;
  double dedup_angle_tol = 1e-6;
  /// Relative: a converged point is maximal if its value is within
  /// global_value_tol * max(1, |q_f|) of the best value found.
  double global_value_tol = 1e-8;
  std::uint64_t rng_seed = 0x5eedULL;
  /// Random starts in addition to the grid; negative means 10 * (n + 1).
  int random_starts = -1;
  /// Above this many grid cells only discrete local maxima of |P| seed Newton.
  int max_grid_seeds = 20000;
  /// For n <= 3, also seed from the argmax of a dense grid scan.
  bool grid_cross_check = true;

  /// Throws ValidationError unless all tolerances are positive and the grid
  /// has at least 4 points per dimension.
  void validate() const;
};

struct CriticalPoint {
  TorusPoint point;  // canonical
  double value = 0.0;
  double gradient_norm = 0.0;
  MatR hessian;
  VecR hessian_eigenvalues;  // ascending
};

struct RefineResult {
  CriticalPoint critical;
  bool converged = false;
  int iterations = 0;
};

/// Global maxima of Z_f, deduplicated up to dedup_angle_tol. Ordered by
/// decreasing value, ties broken lexicographically on the canonical point.
struct MaximaSet {
  double q_f = 0.0;
  std::vector<CriticalPoint> maxima;
  double converged_fraction = 0.0;
  int seeds = 0;
  /// Some maximum has a numerically singular Hessian (continuum or higher
  /// order maximum).
  bool degenerate = false;
  std::vector<std::string> warnings;
};

struct GridScan {
  double value;
  TorusPoint argmax;
};

/// Brute-force max of Z_f over a uniform grid with `points_per_dim` points
/// in every coordinate (theta_0 included). Refuses grids above 1e9 cells.
GridScan grid_scan(const XorGame& game, int points_per_dim);
double grid_oracle_qf(const XorGame& game, int points_per_dim);

/// Damped Newton ascent from `seed`. Non-convergence is reported through
/// RefineResult::converged, never silently.
RefineResult refine_maximum(const XorGame& game, const TorusPoint& seed, const OptimizerConfig& config = {});

MaximaSet find_global_maxima(const XorGame& game, const OptimizerConfig& config = {});

double compute_qf(const XorGame& game);

struct QfPrimeOptions {
  /// Permit n > 4 (the search grows like 2^n * k^n).
  bool allow_large = false;
  int seeds_per_dim = 7;
};

/// Max of Z_f over the torus with the open sign quadrants
/// {all theta_j in (0, pi)} and {all theta_j in (-pi, 0)} removed.
double compute_qf_prime(const XorGame& game, const QfPrimeOptions& options = {});

}  // namespace xorst
