#include "xorst/game.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace xorst {

XorGame::XorGame(int players, std::vector<double> table) : players_(players), table_(std::move(table)) {
  if (players < 1 || players > kMaxPlayers)
    throw ValidationError("player count must be in [1, " + std::to_string(kMaxPlayers) + "], got " +
                          std::to_string(players));
  if (table_.size() != (std::size_t{1} << players))
    throw ValidationError("table length " + std::to_string(table_.size()) + " does not equal 2^" +
                          std::to_string(players));
  for (std::size_t i = 0; i < table_.size(); ++i)
    if (!std::isfinite(table_[i])) throw ValidationError("table entry " + std::to_string(i) + " is not finite");
}

XorGame XorGame::chsh() { return XorGame(2, {1, 1, 1, -1}); }

XorGame XorGame::ghz3() { return XorGame(3, {-1, 0, 0, 1, 0, 1, 1, 0}); }

XorGame XorGame::h_alpha(double alpha) { return XorGame(2, {alpha, alpha, 1, -1}); }

TorusPoint::TorusPoint(std::initializer_list<double> values) : theta(static_cast<Eigen::Index>(values.size())) {
  Eigen::Index k = 0;
  for (double v : values) theta(k++) = v;
}

TorusPoint TorusPoint::canonical() const {
  return TorusPoint(VecR(theta.unaryExpr([](double x) { return wrap_angle(x); })));
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  double d = 0.0;
  for (Eigen::Index k = 0; k < a.theta.size(); ++k) d = std::max(d, circle_distance(a.theta(k), b.theta(k)));
  return d;
}

namespace {

void require_point(const XorGame& game, const TorusPoint& point) {
  if (point.theta.size() != game.players() + 1)
    throw ValidationError("torus point has " + std::to_string(point.theta.size()) + " coordinates, expected " +
                          std::to_string(game.players() + 1));
}

// phase[idx] = sum_k i_k theta_k, built by peeling the lowest set bit.
std::vector<double> spatial_phases(const XorGame& game, const TorusPoint& point) {
  const int n = game.players();
  std::vector<double> phase(game.size(), 0.0);
  for (std::size_t idx = 1; idx < game.size(); ++idx) {
    const std::size_t low = idx & (~idx + 1);
    const int pos = std::countr_zero(low);
    phase[idx] = phase[idx ^ low] + point.theta(n - pos);
  }
  return phase;
}

}  // namespace

cd eval_P(const XorGame& game, std::span<const cd> lambda) {
  const int n = game.players();
  if (static_cast<int>(lambda.size()) != n)
    throw ValidationError("eval_P expects " + std::to_string(n) + " arguments");
  std::vector<cd> mono(game.size(), cd(1.0));
  cd total = game[0];
  for (std::size_t idx = 1; idx < game.size(); ++idx) {
    const std::size_t low = idx & (~idx + 1);
    mono[idx] = mono[idx ^ low] * lambda[n - 1 - std::countr_zero(low)];
    total += game[idx] * mono[idx];
  }
  return total;
}

cd eval_P_on_circle(const XorGame& game, const TorusPoint& point) {
  require_point(game, point);
  std::vector<cd> lambda(game.players());
  for (int k = 0; k < game.players(); ++k) lambda[k] = std::polar(1.0, point.theta(k + 1));
  return eval_P(game, lambda);
}

double eval_Z(const XorGame& game, const TorusPoint& point) {
  require_point(game, point);
  const auto phase = spatial_phases(game, point);
  double z = 0.0;
  for (std::size_t idx = 0; idx < game.size(); ++idx)
    if (game[idx] != 0.0) z += game[idx] * std::cos(point.theta(0) + phase[idx]);
  return z;
}

ZDerivatives z_derivatives(const XorGame& game, const TorusPoint& point) {
  require_point(game, point);
  const int n = game.players();
  const auto phase = spatial_phases(game, point);
  ZDerivatives d{0.0, VecR::Zero(n + 1), MatR::Zero(n + 1, n + 1)};
  Eigen::VectorXd ind(n + 1);
  for (std::size_t idx = 0; idx < game.size(); ++idx) {
    const double f = game[idx];
    if (f == 0.0) continue;
    const double arg = point.theta(0) + phase[idx];
    const double c = f * std::cos(arg);
    const double s = f * std::sin(arg);
    ind(0) = 1.0;
    for (int k = 1; k <= n; ++k) ind(k) = game.bit(idx, k);
    d.value += c;
    d.gradient -= s * ind;
    d.hessian.noalias() -= c * ind * ind.transpose();
  }
  return d;
}

VecR grad_Z(const XorGame& game, const TorusPoint& point) { return z_derivatives(game, point).gradient; }

MatR hess_Z(const XorGame& game, const TorusPoint& point) { return z_derivatives(game, point).hessian; }

namespace {

void require_transform(const XorGame& game, const GameTransform& t) {
  if (static_cast<int>(t.b.size()) != game.players())
    throw ValidationError("transform needs one bit per player");
  auto is_bit = [](int x) { return x == 0 || x == 1; };
  if (!is_bit(t.b0)) throw ValidationError("b0 must be 0 or 1");
  for (int x : t.b)
    if (!is_bit(x)) throw ValidationError("transform bits must be 0 or 1");
}

}  // namespace

XorGame transform_game(const XorGame& game, const GameTransform& t) {
  require_transform(game, t);
  const int n = game.players();
  std::size_t mask = 0;
  for (int k = 1; k <= n; ++k)
    if (t.b[k - 1]) mask |= std::size_t{1} << (n - k);
  const double sign = t.b0 ? -1.0 : 1.0;
  std::vector<double> table(game.size());
  for (std::size_t i = 0; i < game.size(); ++i) table[i] = sign * game[i ^ mask];
  return XorGame(n, std::move(table));
}

TorusPoint to_original_frame(const TorusPoint& point, const GameTransform& t) {
  const int n = point.players();
  VecR out(n + 1);
  out(0) = point.theta(0) + t.b0 * kPi;
  for (int k = 1; k <= n; ++k) {
    out(0) += t.b[k - 1] * point.theta(k);
    out(k) = t.b[k - 1] ? -point.theta(k) : point.theta(k);
  }
  return TorusPoint(out);
}

TorusPoint to_transformed_frame(const TorusPoint& point, const GameTransform& t) {
  const int n = point.players();
  VecR out(n + 1);
  out(0) = point.theta(0) - t.b0 * kPi;
  for (int k = 1; k <= n; ++k) {
    out(k) = t.b[k - 1] ? -point.theta(k) : point.theta(k);
    out(0) -= t.b[k - 1] * out(k);
  }
  return TorusPoint(out);
}

}  // namespace xorst
