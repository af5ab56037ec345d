#include "xorst/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "xorst/parallel.hpp"

namespace xorst {

void OptimizerConfig::validate() const {
  if (grid_points_per_dim < 4) throw ValidationError("grid_points_per_dim must be at least 4");
  if (newton_max_iters < 1) throw ValidationError("newton_max_iters must be positive");
  if (!(gradient_tol > 0) || !(dedup_angle_tol > 0) || !(global_value_tol > 0))
    throw ValidationError("optimizer tolerances must be positive");
  if (max_grid_seeds < 1) throw ValidationError("max_grid_seeds must be positive");
}

namespace {

constexpr double kGridCellLimit = 1e9;
constexpr double kSingularRelTol = 1e-6;

double table_scale(const XorGame& game) {
  double s = 0.0;
  for (double f : game.table()) s = std::max(s, std::abs(f));
  return std::max(1.0, s);
}

// Ascent direction V diag(1 / max(|h|, floor)) V^T g: the Newton step when
// H is negative definite, a safeguarded one otherwise.
VecR ascent_step(const MatR& hessian, const VecR& gradient) {
  Eigen::SelfAdjointEigenSolver<MatR> es(hessian);
  const VecR& h = es.eigenvalues();
  const double floor = 1e-8 * std::max(1.0, h.cwiseAbs().maxCoeff());
  VecR scale = h.unaryExpr([floor](double x) { return 1.0 / std::max(std::abs(x), floor); });
  return es.eigenvectors() * scale.asDiagonal() * (es.eigenvectors().transpose() * gradient);
}

// Caps the infinity norm of a step at `cap`.
VecR capped(VecR step, double cap) {
  const double m = step.cwiseAbs().maxCoeff();
  if (m > cap) step *= cap / m;
  return step;
}

CriticalPoint make_critical(const XorGame& game, const TorusPoint& x) {
  CriticalPoint cp;
  cp.point = x.canonical();
  const auto d = z_derivatives(game, cp.point);
  cp.value = d.value;
  cp.gradient_norm = d.gradient.norm();
  cp.hessian = d.hessian;
  cp.hessian_eigenvalues = Eigen::SelfAdjointEigenSolver<MatR>(d.hessian, Eigen::EigenvaluesOnly).eigenvalues();
  return cp;
}

bool lex_less(const TorusPoint& a, const TorusPoint& b) {
  return std::lexicographical_compare(a.theta.begin(), a.theta.end(), b.theta.begin(), b.theta.end());
}

}  // namespace

GridScan grid_scan(const XorGame& game, int points_per_dim) {
  const int n = game.players();
  if (points_per_dim < 1) throw ValidationError("grid needs at least one point per dimension");
  if (std::pow(static_cast<double>(points_per_dim), n + 1) > kGridCellLimit)
    throw SizeLimitError("grid scan would evaluate more than 1e9 points");
  const int g = points_per_dim;
  std::vector<double> grid(g), cos0(g), sin0(g);
  for (int k = 0; k < g; ++k) {
    grid[k] = -kPi + 2.0 * kPi * k / g;
    cos0[k] = std::cos(grid[k]);
    sin0[k] = std::sin(grid[k]);
  }
  // For fixed (theta_1..theta_n), Z(theta_0) = A cos theta_0 - B sin theta_0
  // with A + iB = P(e^{i theta}); the inner theta_0 loop is exact per cell.
  GridScan best{-std::numeric_limits<double>::infinity(), TorusPoint(VecR::Zero(n + 1))};
  std::vector<int> idx(n, 0);
  std::vector<cd> lambda(n);
  const std::int64_t cells = checked_pow(g, n, std::int64_t{1} << 62);
  for (std::int64_t c = 0; c < cells; ++c) {
    std::int64_t rem = c;
    for (int k = n - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % g);
      rem /= g;
      lambda[k] = cd(std::cos(grid[idx[k]]), std::sin(grid[idx[k]]));
    }
    const cd p = eval_P(game, lambda);
    for (int j = 0; j < g; ++j) {
      const double z = p.real() * cos0[j] - p.imag() * sin0[j];
      if (z > best.value) {
        best.value = z;
        best.argmax.theta(0) = grid[j];
        for (int k = 0; k < n; ++k) best.argmax.theta(k + 1) = grid[idx[k]];
      }
    }
  }
  return best;
}

double grid_oracle_qf(const XorGame& game, int points_per_dim) { return grid_scan(game, points_per_dim).value; }

RefineResult refine_maximum(const XorGame& game, const TorusPoint& seed, const OptimizerConfig& config) {
  config.validate();
  if (seed.theta.size() != game.players() + 1) throw ValidationError("seed has the wrong dimension");
  const double scale = table_scale(game);
  const double gtol = config.gradient_tol * scale;
  const double noise = 1e-13 * std::accumulate(game.table().begin(), game.table().end(), 1.0,
                                              [](double a, double f) { return a + std::abs(f); });
  TorusPoint x = seed;
  RefineResult out;
  for (int it = 0; it < config.newton_max_iters; ++it) {
    out.iterations = it;
    const auto d = z_derivatives(game, x);
    if (d.gradient.norm() <= gtol) {
      out.converged = true;
      break;
    }
    auto try_direction = [&](const VecR& dir) {
      const double slope = d.gradient.dot(dir);
      for (double t = 1.0; t > 1e-12; t *= 0.5) {
        const TorusPoint cand(VecR(x.theta + t * dir));
        const double z = eval_Z(game, cand);
        const bool armijo = z >= d.value + 1e-4 * t * slope;
        const bool tiny = (t * dir).cwiseAbs().maxCoeff() < 1e-6 && z >= d.value - noise;
        if (armijo || tiny) {
          x = cand;
          return true;
        }
      }
      return false;
    };
    if (!try_direction(capped(ascent_step(d.hessian, d.gradient), kPi / 2)) &&
        !try_direction(capped(d.gradient, kPi / 4)))
      break;
  }
  if (!out.converged) {
    out.converged = z_derivatives(game, x).gradient.norm() <= gtol;
    if (out.converged) ++out.iterations;
  }
  out.critical = make_critical(game, x);
  return out;
}

namespace {

std::vector<TorusPoint> grid_seeds(const XorGame& game, const OptimizerConfig& config) {
  const int n = game.players();
  const int g = config.grid_points_per_dim;
  const std::int64_t cells = checked_pow(g, n, std::int64_t{1} << 40);
  if (cells > (std::int64_t{1} << 26)) throw SizeLimitError("grid seeding too large for this player count");
  std::vector<double> grid(g);
  for (int k = 0; k < g; ++k) grid[k] = -kPi + 2.0 * kPi * (k + 0.5) / g;

  std::vector<double> absp(cells);
  std::vector<double> theta0(cells);
  std::vector<cd> lambda(n);
  auto coords = [&](std::int64_t c, std::vector<int>& idx) {
    for (int k = n - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(c % g);
      c /= g;
    }
  };
  std::vector<int> idx(n);
  for (std::int64_t c = 0; c < cells; ++c) {
    coords(c, idx);
    for (int k = 0; k < n; ++k) lambda[k] = std::polar(1.0, grid[idx[k]]);
    const cd p = eval_P(game, lambda);
    absp[c] = std::abs(p);
    theta0[c] = absp[c] > 1e-12 ? -std::arg(p) : 0.0;
  }

  std::vector<std::int64_t> chosen;
  if (cells <= config.max_grid_seeds) {
    chosen.resize(cells);
    std::iota(chosen.begin(), chosen.end(), 0);
  } else {
    // Discrete local maxima of |P| over the 3^n - 1 periodic neighbours.
    const std::int64_t nbrs = checked_pow(3, n, std::int64_t{1} << 40);
    std::vector<int> nidx(n);
    for (std::int64_t c = 0; c < cells; ++c) {
      coords(c, idx);
      bool local_max = true;
      for (std::int64_t m = 0; m < nbrs && local_max; ++m) {
        std::int64_t r = m, flat = 0;
        for (int k = 0; k < n; ++k) {
          nidx[k] = (idx[k] + static_cast<int>(r % 3) - 1 + g) % g;
          r /= 3;
        }
        for (int k = 0; k < n; ++k) flat = flat * g + nidx[k];
        if (absp[flat] > absp[c]) local_max = false;
      }
      if (local_max) chosen.push_back(c);
    }
    if (static_cast<std::int64_t>(chosen.size()) > config.max_grid_seeds) {
      std::stable_sort(chosen.begin(), chosen.end(),
                       [&](std::int64_t a, std::int64_t b) { return absp[a] > absp[b]; });
      chosen.resize(config.max_grid_seeds);
    }
  }
  std::vector<TorusPoint> seeds;
  seeds.reserve(chosen.size());
  for (std::int64_t c : chosen) {
    coords(c, idx);
    VecR t(n + 1);
    t(0) = theta0[c];
    for (int k = 0; k < n; ++k) t(k + 1) = grid[idx[k]];
    seeds.emplace_back(t);
  }
  return seeds;
}

}  // namespace

MaximaSet find_global_maxima(const XorGame& game, const OptimizerConfig& config) {
  config.validate();
  const int n = game.players();
  if (std::all_of(game.table().begin(), game.table().end(), [](double v) { return v == 0.0; })) {
    // Z vanishes identically: the whole torus is maximal, represented by the origin.
    MaximaSet out;
    out.seeds = 1;
    out.converged_fraction = 1.0;
    out.q_f = 0.0;
    out.maxima.push_back(refine_maximum(game, TorusPoint(VecR::Zero(n + 1)), config).critical);
    out.degenerate = true;
    out.warnings.push_back("zero game: every point is a global maximum");
    return out;
  }
  std::vector<TorusPoint> seeds = grid_seeds(game, config);

  Rng rng(config.rng_seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const int extra = config.random_starts >= 0 ? config.random_starts : 10 * (n + 1);
  for (int s = 0; s < extra; ++s) {
    VecR t(n + 1);
    for (int k = 0; k <= n; ++k) t(k) = angle(rng);
    seeds.emplace_back(t);
  }
  std::optional<GridScan> scan;
  if (config.grid_cross_check && n <= 3) {
    scan = grid_scan(game, n <= 2 ? 120 : 40);
    seeds.push_back(scan->argmax);
  }

  std::vector<RefineResult> results(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) { results[i] = refine_maximum(game, seeds[i], config); });

  MaximaSet out;
  out.seeds = static_cast<int>(seeds.size());
  const auto n_conv = std::count_if(results.begin(), results.end(), [](const RefineResult& r) { return r.converged; });
  out.converged_fraction = static_cast<double>(n_conv) / static_cast<double>(seeds.size());
  if (out.converged_fraction < 0.5)
    out.warnings.push_back("only " + std::to_string(n_conv) + " of " + std::to_string(seeds.size()) +
                           " Newton runs converged");

  const bool use_all = n_conv == 0;
  double q = -std::numeric_limits<double>::infinity();
  for (const auto& r : results)
    if (r.converged || use_all) q = std::max(q, r.critical.value);
  out.q_f = q;
  const double vtol = config.global_value_tol * std::max(1.0, std::abs(q));

  std::vector<const CriticalPoint*> cands;
  for (const auto& r : results)
    if ((r.converged || use_all) && r.critical.value >= q - vtol) cands.push_back(&r.critical);
  std::stable_sort(cands.begin(), cands.end(), [](const CriticalPoint* a, const CriticalPoint* b) {
    if (a->value != b->value) return a->value > b->value;
    return lex_less(a->point, b->point);
  });
  for (const CriticalPoint* c : cands) {
    const bool dup = std::any_of(out.maxima.begin(), out.maxima.end(), [&](const CriticalPoint& m) {
      return torus_distance(m.point, c->point) <= config.dedup_angle_tol;
    });
    if (!dup) out.maxima.push_back(*c);
  }

  for (const auto& m : out.maxima) {
    const double big = std::max(1.0, m.hessian_eigenvalues.cwiseAbs().maxCoeff());
    if (m.hessian_eigenvalues.cwiseAbs().minCoeff() <= kSingularRelTol * big) out.degenerate = true;
  }
  if (out.degenerate) out.warnings.push_back("a global maximum has a singular Hessian");
  if (out.maxima.size() > 64)
    out.warnings.push_back(std::to_string(out.maxima.size()) + " distinct maxima found; maxima likely form a continuum");
  if (scan && scan->value > q + vtol)
    out.warnings.push_back("grid scan found a value above every refined maximum");
  return out;
}

double compute_qf(const XorGame& game) { return find_global_maxima(game).q_f; }

namespace {

// h(theta) = |P(e^{i theta})|^2 on the spatial coordinates only.
struct HDerivatives {
  double value;
  VecR gradient;
  MatR hessian;
};

HDerivatives h_derivatives(const XorGame& game, const VecR& theta) {
  const int n = game.players();
  cd p = 0.0;
  Eigen::VectorXcd dp = Eigen::VectorXcd::Zero(n);
  MatC ddp = MatC::Zero(n, n);
  Eigen::VectorXd ind(n);
  for (std::size_t idx = 0; idx < game.size(); ++idx) {
    const double f = game[idx];
    if (f == 0.0) continue;
    double phase = 0.0;
    for (int k = 1; k <= n; ++k) {
      ind(k - 1) = game.bit(idx, k);
      phase += ind(k - 1) * theta(k - 1);
    }
    const cd e = f * std::polar(1.0, phase);
    p += e;
    dp += kI * e * ind.cast<cd>();
    ddp -= e * (ind * ind.transpose()).cast<cd>();
  }
  HDerivatives h;
  h.value = std::norm(p);
  h.gradient = 2.0 * (std::conj(p) * dp).real();
  // d_a d_b |P|^2 = 2 Re(conj(P) d_ab P + d_a P conj(d_b P)).
  h.hessian = 2.0 * (std::conj(p) * ddp).real() + 2.0 * (dp * dp.adjoint()).real();
  h.hessian = 0.5 * (h.hessian + h.hessian.transpose()).eval();
  return h;
}

// Projected Newton ascent of h over the box [lo, hi].
double maximize_h_in_box(const XorGame& game, VecR x, const VecR& lo, const VecR& hi) {
  const int n = static_cast<int>(x.size());
  auto clamp = [&](VecR v) {
    for (int k = 0; k < n; ++k) v(k) = std::clamp(v(k), lo(k), hi(k));
    return v;
  };
  x = clamp(x);
  double l1 = 1.0;
  for (double f : game.table()) l1 += std::abs(f);
  const double noise = 1e-13 * l1 * l1;
  for (int it = 0; it < 200; ++it) {
    const auto d = h_derivatives(game, x);
    std::vector<int> free;
    for (int k = 0; k < n; ++k) {
      const bool at_lo = x(k) <= lo(k) && d.gradient(k) <= 0;
      const bool at_hi = x(k) >= hi(k) && d.gradient(k) >= 0;
      if (!at_lo && !at_hi) free.push_back(k);
    }
    VecR gf(free.size());
    MatR hf(free.size(), free.size());
    for (std::size_t a = 0; a < free.size(); ++a) {
      gf(a) = d.gradient(free[a]);
      for (std::size_t b = 0; b < free.size(); ++b) hf(a, b) = d.hessian(free[a], free[b]);
    }
    if (free.empty() || gf.norm() <= 1e-12 * l1 * l1) return d.value;
    auto try_direction = [&](const VecR& dir_free) {
      VecR dir = VecR::Zero(n);
      for (std::size_t a = 0; a < free.size(); ++a) dir(free[a]) = dir_free(a);
      for (double t = 1.0; t > 1e-12; t *= 0.5) {
        const VecR cand = clamp(x + t * dir);
        const double v = h_derivatives(game, cand).value;
        const bool armijo = v >= d.value + 1e-4 * d.gradient.dot(cand - x);
        const bool tiny = (cand - x).cwiseAbs().maxCoeff() < 1e-7 && v >= d.value - noise;
        if ((armijo && v >= d.value) || tiny) {
          const bool moved = (cand - x).cwiseAbs().maxCoeff() > 0;
          x = cand;
          return moved;
        }
      }
      return false;
    };
    if (!try_direction(capped(ascent_step(hf, gf), kPi / 2)) && !try_direction(capped(gf, kPi / 4)))
      return h_derivatives(game, x).value;
  }
  return h_derivatives(game, x).value;
}

double max_over_box(const XorGame& game, const VecR& lo, const VecR& hi, int k) {
  const int n = static_cast<int>(lo.size());
  std::vector<int> varying;
  for (int j = 0; j < n; ++j)
    if (hi(j) > lo(j)) varying.push_back(j);
  const std::int64_t starts = checked_pow(k, static_cast<int>(varying.size()), std::int64_t{1} << 40);
  std::vector<double> best(starts, 0.0);
  parallel_for(static_cast<std::size_t>(starts), [&](std::size_t s) {
    VecR x = lo;
    std::int64_t rem = static_cast<std::int64_t>(s);
    for (int j : varying) {
      const int c = static_cast<int>(rem % k);
      rem /= k;
      x(j) = lo(j) + (hi(j) - lo(j)) * (c + 0.5) / k;
    }
    best[s] = maximize_h_in_box(game, x, lo, hi);
  });
  return *std::max_element(best.begin(), best.end());
}

}  // namespace

double compute_qf_prime(const XorGame& game, const QfPrimeOptions& options) {
  const int n = game.players();
  if (n > 4 && !options.allow_large)
    throw SizeLimitError("compute_qf_prime refuses n > 4 without allow_large");
  if (options.seeds_per_dim < 2) throw ValidationError("seeds_per_dim must be at least 2");
  const int k = options.seeds_per_dim;
  double best = 0.0;
  // Closed boxes for the mixed sign patterns.
  const unsigned all = (1u << n) - 1;
  for (unsigned s = 1; s < all; ++s) {
    VecR lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
      const bool pos = (s >> j) & 1u;
      lo(j) = pos ? 0.0 : -kPi;
      hi(j) = pos ? kPi : 0.0;
    }
    best = std::max(best, max_over_box(game, lo, hi, k));
  }
  // Faces with one coordinate pinned to 0 or pi (pi and -pi coincide).
  for (int j = 0; j < n; ++j) {
    for (double pin : {0.0, kPi}) {
      VecR lo = VecR::Constant(n, -kPi), hi = VecR::Constant(n, kPi);
      lo(j) = hi(j) = pin;
      best = std::max(best, max_over_box(game, lo, hi, k));
    }
  }
  return std::sqrt(best);
}

}  // namespace xorst
