#include "xorst/verdict.hpp"

#include <cmath>

namespace xorst {

std::optional<std::size_t> check_condition_A(const MaximaSet& maxima, double tol) {
  for (std::size_t i = 0; i < maxima.maxima.size(); ++i) {
    const auto& t = maxima.maxima[i].point.theta;
    bool ok = true;
    for (Eigen::Index k = 1; k < t.size() && ok; ++k) ok = distance_to_pi_multiple(t(k)) > tol;
    if (ok) return i;
  }
  return std::nullopt;
}

bool equivalent_maxima(const TorusPoint& p, const TorusPoint& q, double tol) {
  if (p.theta.size() != q.theta.size()) throw ValidationError("points live on different tori");
  return torus_distance(p, q) <= tol || torus_distance(p, -q) <= tol;
}

bool check_condition_B(const MaximaSet& maxima, const TorusPoint& witness, double tol) {
  for (const auto& m : maxima.maxima)
    if (!equivalent_maxima(m.point, witness, tol)) return false;
  return true;
}

bool check_condition_C(const MaximaSet& maxima, double tol) {
  if (maxima.degenerate || maxima.maxima.empty()) return false;
  for (const auto& m : maxima.maxima) {
    const VecR a = m.hessian_eigenvalues.cwiseAbs();
    if (a.minCoeff() <= tol * std::max(1.0, a.maxCoeff())) return false;
  }
  return true;
}

GameTransform normalizing_transform(const TorusPoint& witness) {
  GameTransform t;
  const int n = witness.players();
  t.b.resize(n);
  for (int k = 1; k <= n; ++k) t.b[k - 1] = wrap_angle(witness[k]) < 0 ? 1 : 0;
  const double beta0 = wrap_angle(to_transformed_frame(witness, t).theta(0));
  if (beta0 < 0 || beta0 >= kPi) t.b0 = 1;
  return t;
}

Verdict classify(const XorGame& game, const VerdictConfig& config) {
  Verdict v;
  v.maxima = find_global_maxima(game, config.optimizer);
  v.q_f = v.maxima.q_f;
  v.notes.push_back("condition C is evaluated as nonsingularity of the Hessian at every maximum");

  v.condition_C = check_condition_C(v.maxima, config.singular_tol);
  if (v.maxima.degenerate) v.notes.push_back("maxima set is degenerate; condition C forced false");

  if (auto w = check_condition_A(v.maxima, config.angle_tol)) {
    v.condition_A = true;
    v.witness = v.maxima.maxima[*w].point;
    v.condition_B = check_condition_B(v.maxima, *v.witness, config.equivalence_tol);
  }
  v.is_self_test = v.condition_A && v.condition_B;
  v.is_robust_self_test = v.is_self_test && v.condition_C;
  if (!v.condition_A)
    v.reason = "condition A";
  else if (!v.condition_B)
    v.reason = "condition B";
  else if (!v.condition_C)
    v.reason = "condition C";

  if (v.is_self_test) {
    v.normalization = normalizing_transform(*v.witness);
    v.normalized_witness = to_transformed_frame(*v.witness, *v.normalization).canonical();
    const XorGame g = transform_game(game, *v.normalization);
    const double vtol = config.optimizer.global_value_tol * std::max(1.0, std::abs(v.q_f));
    if (std::abs(eval_Z(g, *v.normalized_witness) - v.q_f) > vtol)
      v.notes.push_back("normalized witness does not reproduce q_f");
    QfPrimeOptions qo;
    qo.allow_large = true;
    qo.seeds_per_dim = game.players() <= 4 ? 7 : 4;
    v.q_f_prime = compute_qf_prime(g, qo);
    if (v.is_robust_self_test) {
      const double gap = v.q_f - *v.q_f_prime;
      if (gap > 0)
        v.K2 = 2.0 / std::sqrt(gap);
      else
        v.notes.push_back("q_f' is not below q_f; K2 undefined");
    }
  }
  return v;
}

}  // namespace xorst
