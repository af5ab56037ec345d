#pragma once

#include <span>
#include <string>
#include <vector>

#include "xorst/linalg.hpp"

namespace xorst {

inline constexpr int kMaxPlayers = 12;

/// An n-player XOR game: a real weight for every input string in {0,1}^n.
///
/// Table index of (i_1, ..., i_n) is sum_k i_k * 2^(n-k); player 1 owns the
/// most significant bit.
class XorGame {
 public:
  XorGame(int players, std::vector<double> table);

  int players() const { return players_; }
  std::size_t size() const { return table_.size(); }
  double operator[](std::size_t index) const { return table_[index]; }
  const std::vector<double>& table() const { return table_; }

  /// Input bit of `player` (1-based) in table entry `index`.
  int bit(std::size_t index, int player) const {
    return static_cast<int>((index >> (players_ - player)) & 1u);
  }

  bool operator==(const XorGame&) const = default;

  static XorGame chsh();
  /// f(000) = -1, f(011) = f(101) = f(110) = 1, zero elsewhere.
  static XorGame ghz3();
  /// Table {alpha, alpha, 1, -1}.
  static XorGame h_alpha(double alpha);

 private:
  int players_;
  std::vector<double> table_;
};

/// A point (theta_0, theta_1, ..., theta_n) of the (n+1)-torus.
struct TorusPoint {
  VecR theta;

  TorusPoint() = default;
  explicit TorusPoint(VecR t) : theta(std::move(t)) {}
  TorusPoint(std::initializer_list<double> values);

  int players() const { return static_cast<int>(theta.size()) - 1; }
  double operator[](int k) const { return theta(k); }

  /// Every coordinate wrapped into (-pi, pi].
  TorusPoint canonical() const;
  TorusPoint operator-() const { return TorusPoint(VecR(-theta)); }
};

/// max_k circle_distance(a_k, b_k).
double torus_distance(const TorusPoint& a, const TorusPoint& b);

/// P_f(lambda) = sum_i f(i) prod_k lambda_k^{i_k}.
cd eval_P(const XorGame& game, std::span<const cd> lambda);

/// P_f(e^{i theta_1}, ..., e^{i theta_n}) for the spatial part of `point`.
cd eval_P_on_circle(const XorGame& game, const TorusPoint& point);

/// Z_f(theta) = sum_i f(i) cos(theta_0 + sum_k i_k theta_k).
double eval_Z(const XorGame& game, const TorusPoint& point);

VecR grad_Z(const XorGame& game, const TorusPoint& point);
MatR hess_Z(const XorGame& game, const TorusPoint& point);

struct ZDerivatives {
  double value;
  VecR gradient;
  MatR hessian;
};

/// Value, gradient and Hessian in one pass.
ZDerivatives z_derivatives(const XorGame& game, const TorusPoint& point);

/// Sign/relabel bits for g(i) = (-1)^{b0} f(b xor i).
struct GameTransform {
  int b0 = 0;
  std::vector<int> b;  // one bit per player
};

XorGame transform_game(const XorGame& game, const GameTransform& t);

/// Maps a point of the transformed game g to the point of f with the same
/// value: Z_g(theta) = Z_f(to_original_frame(theta)).
TorusPoint to_original_frame(const TorusPoint& point, const GameTransform& t);

/// Inverse of to_original_frame.
TorusPoint to_transformed_frame(const TorusPoint& point, const GameTransform& t);

}  // namespace xorst
