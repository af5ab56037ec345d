#include <gtest/gtest.h>

#include "../oracles.hpp"
#include "xorst/verdict.hpp"

using namespace xorst;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST(ConditionA, ChshWitness) {
  const MaximaSet m = find_global_maxima(XorGame::chsh());
  const auto w = check_condition_A(m);
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(equivalent_maxima(m.maxima[*w].point, {-kPi / 4, kPi / 2, kPi / 2}));
}

TEST(ConditionA, FailsWhenMaximaSitOnPiMultiples) {
  const MaximaSet m = find_global_maxima(XorGame(2, {1, 1, 1, 1}));
  EXPECT_FALSE(check_condition_A(m).has_value());
  const MaximaSet zero = find_global_maxima(XorGame(2, {0, 0, 0, 0}));
  EXPECT_FALSE(check_condition_A(zero).has_value());
  EXPECT_TRUE(zero.degenerate);
}

TEST(ConditionB, ChshAndHAlpha) {
  const MaximaSet m = find_global_maxima(XorGame::chsh());
  EXPECT_TRUE(check_condition_B(m, m.maxima[*check_condition_A(m)].point));
  const MaximaSet h = find_global_maxima(XorGame::h_alpha(2.0));
  EXPECT_TRUE(check_condition_B(h, h.maxima[*check_condition_A(h)].point));
}

TEST(ConditionB, IdlePlayerBreaksUniqueness) {
  // f(i1, i2, 0) = CHSH(i1, i2), f(i1, i2, 1) = 0: theta_3 is a free direction.
  const XorGame g(3, {1, 0, 1, 0, 1, 0, -1, 0});
  const Verdict v = classify(g);
  EXPECT_FALSE(v.is_self_test);
  EXPECT_FALSE(v.is_robust_self_test);
  EXPECT_TRUE(!v.condition_A || !v.condition_B);
}

TEST(ConditionC, ChshHessianDeterminant) {
  const MaximaSet m = find_global_maxima(XorGame::chsh());
  EXPECT_TRUE(check_condition_C(m));
  EXPECT_NEAR(m.maxima[0].hessian.determinant(), -kSqrt2, 1e-9);
  EXPECT_FALSE(check_condition_C(find_global_maxima(XorGame(2, {0, 0, 0, 0}))));
  for (double a : {1.5, 2.0, 3.0}) EXPECT_TRUE(check_condition_C(find_global_maxima(XorGame::h_alpha(a))));
}

TEST(Equivalence, SignsAndShifts) {
  const TorusPoint p{-kPi / 4, kPi / 2, kPi / 2};
  EXPECT_TRUE(equivalent_maxima(p, {kPi / 4, -kPi / 2, -kPi / 2}));
  EXPECT_TRUE(equivalent_maxima(p, {-kPi / 4 + 2 * kPi, kPi / 2 - 2 * kPi, kPi / 2}));
  EXPECT_FALSE(equivalent_maxima(p, {kPi / 4, kPi / 2, kPi / 2}));
  EXPECT_THROW(equivalent_maxima(p, {0, 0}), ValidationError);
}

TEST(Classify, ChshRobustWithK2) {
  const Verdict v = classify(XorGame::chsh());
  EXPECT_TRUE(v.is_self_test);
  EXPECT_TRUE(v.is_robust_self_test);
  ASSERT_TRUE(v.K2 && v.q_f_prime);
  EXPECT_NEAR(*v.q_f_prime, 2.0, 1e-9);
  EXPECT_NEAR(*v.K2, 2 / std::sqrt(2 * kSqrt2 - 2), 1e-6);
  EXPECT_TRUE(v.reason.empty());
  // normalized witness lies in the positive quadrant with theta_0 in [0, pi)
  ASSERT_TRUE(v.normalized_witness);
  EXPECT_GE((*v.normalized_witness)[0], 0.0);
  EXPECT_LT((*v.normalized_witness)[0], kPi);
  for (int k = 1; k <= 2; ++k) {
    EXPECT_GT((*v.normalized_witness)[k], 0.0);
    EXPECT_LT((*v.normalized_witness)[k], kPi);
  }
}

TEST(Classify, GhzAndHAlphaRobust) {
  EXPECT_TRUE(classify(XorGame::ghz3()).is_robust_self_test);
  for (double a : {1.5, 2.0, 3.0}) EXPECT_TRUE(classify(XorGame::h_alpha(a)).is_robust_self_test);
}

TEST(Classify, ConstantGameFailsConditionA) {
  const Verdict v = classify(XorGame(2, {1, 1, 1, 1}));
  EXPECT_FALSE(v.is_self_test);
  EXPECT_EQ(v.reason, "condition A");
  EXPECT_FALSE(v.K2.has_value());
}

TEST(Classify, TypeInvariantsOnRandomGames) {
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    const int n = 2 + t % 2;
    const XorGame g(n, oracle::random_table(n, rng));
    const Verdict v = classify(g);
    EXPECT_EQ(v.is_self_test, v.condition_A && v.condition_B);
    EXPECT_EQ(v.is_robust_self_test, v.condition_A && v.condition_B && v.condition_C);
    EXPECT_EQ(v.K2.has_value(), v.is_robust_self_test);
    if (v.is_robust_self_test) {
      EXPECT_LT(*v.q_f_prime, v.q_f);
      EXPECT_EQ(*v.K2, 2 / std::sqrt(v.q_f - *v.q_f_prime));
    }
  }
}

TEST(Classify, InvariantUnderGameTransforms) {
  Rng rng(23);
  const std::vector<XorGame> games{XorGame::chsh(), XorGame::h_alpha(2.0), XorGame(2, {1, 1, 1, 1}),
                                   XorGame(2, oracle::random_table(2, rng)), XorGame::ghz3()};
  for (const auto& f : games) {
    const Verdict vf = classify(f);
    for (int t = 0; t < 3; ++t) {
      GameTransform tr{static_cast<int>(rng() % 2), {}};
      for (int k = 0; k < f.players(); ++k) tr.b.push_back(static_cast<int>(rng() % 2));
      const Verdict vg = classify(transform_game(f, tr));
      EXPECT_EQ(vf.is_self_test, vg.is_self_test);
      EXPECT_EQ(vf.is_robust_self_test, vg.is_robust_self_test);
      EXPECT_NEAR(vf.q_f, vg.q_f, 1e-8);
      if (vg.witness && vf.witness) {
        // the witness of g maps back onto a maximum of f
        EXPECT_TRUE(equivalent_maxima(to_original_frame(*vg.witness, tr), *vf.witness, 1e-8));
      }
    }
  }
}

TEST(NormalizingTransform, MovesWitnessIntoQuadrant) {
  Rng rng(8);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int t = 0; t < 50; ++t) {
    TorusPoint w{u(rng), u(rng), u(rng), u(rng)};
    const GameTransform tr = normalizing_transform(w);
    const TorusPoint b = to_transformed_frame(w, tr).canonical();
    EXPECT_GE(b[0], 0.0);
    EXPECT_LT(b[0], kPi);
    for (int k = 1; k <= 3; ++k) EXPECT_GT(b[k], 0.0);
  }
}
