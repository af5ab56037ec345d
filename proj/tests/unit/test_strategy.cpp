#include <gtest/gtest.h>

#include <algorithm>

#include "../oracles.hpp"
#include "xorst/strategy.hpp"

using namespace xorst;

namespace {

const double kSqrt2 = std::sqrt(2.0);

TorusPoint random_point(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  VecR t(n + 1);
  for (auto& x : t) x = u(rng);
  return TorusPoint(t);
}

QubitStrategy random_qubit_strategy(int n, Rng& rng) {
  QubitStrategy s;
  s.state = random_unit_vector(1 << n, rng);
  for (int k = 0; k < n; ++k) {
    std::array<Eigen::Matrix2cd, 2> m;
    for (auto& x : m) {
      const Eigen::Matrix2cd u = random_unitary(2, rng);
      x = u * pauli_z() * u.adjoint();
    }
    s.measurements.push_back(m);
  }
  return s;
}

}  // namespace

TEST(TStrategy, ScoreEqualsZ) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 4;
    const XorGame g(n, oracle::random_table(n, rng));
    const TorusPoint p = random_point(n, rng);
    const QubitStrategy s = make_T_strategy(p);
    EXPECT_NEAR(score(g, s), eval_Z(g, p), 1e-10);
    EXPECT_NEAR(oracle::t_strategy_score(g.table(), n, p.theta), eval_Z(g, p), 1e-10);
  }
}

TEST(TStrategy, ChshValues) {
  const auto chsh = XorGame::chsh();
  EXPECT_NEAR(score(chsh, make_T_strategy({-kPi / 4, kPi / 2, kPi / 2})), 2 * kSqrt2, 1e-12);
  const QubitStrategy z = make_T_strategy({0, 0, 0});
  EXPECT_NEAR(score(chsh, z), 2.0, 1e-12);
  for (const auto& m : z.measurements) EXPECT_LE((m[0] - m[1]).norm(), 1e-15);
  Rng rng(1);
  EXPECT_EQ(score(XorGame(2, {0, 0, 0, 0}), random_qubit_strategy(2, rng)), 0.0);
}

TEST(GameOperator, ChshNormAndHermitian) {
  const MatC M = build_game_operator(XorGame::chsh(), make_T_strategy({-kPi / 4, kPi / 2, kPi / 2}));
  EXPECT_LE(hermitian_defect(M), 1e-12);
  EXPECT_NEAR(spectral_norm(M), 2 * kSqrt2, 1e-12);
  EXPECT_EQ(build_game_operator(XorGame(2, {0, 0, 0, 0}), make_T_strategy({0, 0, 0})).norm(), 0.0);
  QubitStrategy one;
  one.state = VecC::Unit(2, 0);
  one.measurements.push_back({pauli_x(), pauli_z()});
  EXPECT_LE((build_game_operator(XorGame(1, {1, 0}), one) - MatC(pauli_x())).norm(), 1e-15);
}

TEST(GameOperator, MatchesDenseOracle) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const int n = 1 + t % 3;
    const XorGame g(n, oracle::random_table(n, rng));
    const QubitStrategy s = random_qubit_strategy(n, rng);
    std::vector<std::array<oracle::CMat, 2>> obs;
    for (const auto& m : s.measurements) obs.push_back({m[0], m[1]});
    EXPECT_LE((build_game_operator(g, s) - oracle::game_operator(g.table(), n, obs)).norm(), 1e-12);
    const oracle::CMat M = oracle::game_operator(g.table(), n, obs);
    EXPECT_NEAR(score(g, s), (s.state.adjoint() * M * s.state)(0, 0).real(), 1e-12);
  }
}

TEST(ReverseDiagonal, EntriesEigenvaluesAndNorm) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 4;
    const XorGame g(n, oracle::random_table(n, rng));
    const TorusPoint p = random_point(n, rng);
    const auto entries = reverse_diagonal_entries(g, p);
    const MatC M = build_game_operator(g, make_T_strategy(p));
    const std::size_t N = entries.size();
    std::vector<double> expected, mods;
    for (std::size_t a = 0; a < N; ++a) {
      EXPECT_LE(std::abs(M(a, N - 1 - a) - entries[a]), 1e-12);
      // entry a = P(e^{i (-1)^{a_k} theta_k})
      oracle::Vec sp(n);
      const auto b = oracle::bits(a, n);
      for (int k = 0; k < n; ++k) sp(k) = (b[k] ? -1 : 1) * p[k + 1];
      EXPECT_LE(std::abs(entries[a] - oracle::P(g.table(), n, sp)), 1e-12);
      mods.push_back(std::abs(entries[a]));
    }
    // pairs {a, complement a} give eigenvalues +-|entry|
    for (std::size_t a = 0; a < N / 2; ++a) {
      expected.push_back(mods[a]);
      expected.push_back(-mods[a]);
    }
    Eigen::SelfAdjointEigenSolver<MatC> es(M);
    std::vector<double> got(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < N; ++i) EXPECT_NEAR(expected[i], got[i], 1e-9);
    EXPECT_NEAR(spectral_norm(M), *std::max_element(mods.begin(), mods.end()), 1e-9);
  }
}

TEST(ReverseDiagonal, ChshAndZeroAngles) {
  const auto e = reverse_diagonal_entries(XorGame::chsh(), {0, kPi / 2, kPi / 2});
  double mx = 0;
  for (const cd& x : e) mx = std::max(mx, std::abs(x));
  EXPECT_NEAR(mx, 2 * kSqrt2, 1e-12);
  for (const cd& x : reverse_diagonal_entries(XorGame::chsh(), {0, 0, 0})) EXPECT_LE(std::abs(x - cd(2, 0)), 1e-14);
}

TEST(StrategyDistance, ClosedForms) {
  const TorusPoint a{0.3, 1.0, 2.0};
  EXPECT_EQ(strategy_distance(make_T_strategy(a), make_T_strategy(a)), 0.0);
  const double h = 0.01;
  EXPECT_NEAR(strategy_distance(make_T_strategy(a), make_T_strategy({0.3 + h, 1.0, 2.0})),
              std::abs(std::polar(1.0, 0.3) - std::polar(1.0, 0.3 + h)) / kSqrt2, 1e-12);
  EXPECT_NEAR(strategy_distance(make_T_strategy(a), make_T_strategy({0.3, 1.0 + h, 2.0})), 2 * std::sin(h / 2), 1e-12);
}

TEST(Canonicalize, FixedPointsAndScalarPairs) {
  const QubitStrategy t = make_T_strategy({0.4, 1.0, 2.5});
  const QubitCanonicalForm c = canonicalize_qubit_strategy(t);
  EXPECT_LE(strategy_distance(c.canonical.strategy, t), 1e-12);
  EXPECT_NEAR(c.canonical.thetas[0], 1.0, 1e-12);
  EXPECT_NEAR(c.canonical.thetas[1], 2.5, 1e-12);
  EXPECT_NEAR(c.canonical.strategy.state(0).real(), 1 / kSqrt2, 1e-12);

  QubitStrategy bad = t;
  bad.measurements[1][0] = Eigen::Matrix2cd::Identity();
  EXPECT_THROW(canonicalize_qubit_strategy(bad), ScalarMeasurementError);
}

TEST(Canonicalize, RandomStrategiesLandInClassS) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 2;
    const XorGame g(n, oracle::random_table(n, rng));
    const QubitStrategy s = random_qubit_strategy(n, rng);
    const QubitCanonicalForm c = canonicalize_qubit_strategy(s);
    const auto& cs = c.canonical;
    EXPECT_NEAR(score(g, cs.strategy), score(g, s), 1e-10);
    EXPECT_LE(std::abs(cs.strategy.state(0).imag()), 1e-12);
    EXPECT_GE(cs.strategy.state(0).real(), -1e-12);
    for (int k = 0; k < n; ++k) {
      EXPECT_GE(cs.thetas[k], 0.0);
      EXPECT_LE(cs.thetas[k], kPi);
      EXPECT_LE((cs.strategy.measurements[k][0] - pauli_x()).norm(), 1e-10);
      EXPECT_LE((cs.strategy.measurements[k][1] - antidiag_phase(cs.thetas[k])).norm(), 1e-10);
      // U M U^dag reproduces the canonical observables
      for (int i = 0; i < 2; ++i)
        EXPECT_LE((c.unitaries[k] * s.measurements[k][i] * c.unitaries[k].adjoint() - cs.strategy.measurements[k][i]).norm(),
                  1e-10);
    }
  }
}

TEST(SScore, DecompositionSumsToScore) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 3;
    const XorGame g(n, oracle::random_table(n, rng));
    const SClassStrategy s = canonicalize_qubit_strategy(random_qubit_strategy(n, rng)).canonical;
    const auto terms = s_score_decomposition(g, s);
    double total = 0, weights = 0;
    for (const auto& term : terms) {
      total += term.weight * term.z_value;
      weights += term.weight;
    }
    EXPECT_NEAR(total, score(g, s.strategy), 1e-10);
    EXPECT_LE(weights, 1 + 1e-12);
  }
}

TEST(SScore, TAndBasisStates) {
  const TorusPoint a{-kPi / 4, kPi / 2, kPi / 2};
  const SClassStrategy t = make_S_strategy({kPi / 2, kPi / 2}, make_T_strategy(a).state);
  int nonzero = 0;
  for (const auto& term : s_score_decomposition(XorGame::chsh(), t)) {
    if (term.weight > 1e-12) {
      ++nonzero;
      EXPECT_NEAR(term.weight, 1.0, 1e-12);
      EXPECT_NEAR(term.z_value, eval_Z(XorGame::chsh(), a), 1e-12);
    }
  }
  EXPECT_EQ(nonzero, 1);
  const SClassStrategy basis = make_S_strategy({0.3, 1.2}, VecC::Unit(4, 0));
  for (const auto& term : s_score_decomposition(XorGame::chsh(), basis)) EXPECT_EQ(term.weight, 0.0);
  EXPECT_NEAR(score(XorGame::chsh(), basis.strategy), 0.0, 1e-15);
  EXPECT_THROW(make_S_strategy({-0.1, 1.0}, VecC::Unit(4, 0)), ValidationError);
}

TEST(PerturbT, ZeroSigmaAndDeterminism) {
  const TorusPoint a{-kPi / 4, kPi / 2, kPi / 2};
  Rng r0(1);
  EXPECT_EQ(strategy_distance(perturb_T(a, 0.0, r0, PerturbMode::AnglesAndState), make_T_strategy(a)), 0.0);
  Rng r1(9), r2(9);
  EXPECT_EQ(strategy_distance(perturb_T(a, 0.1, r1, PerturbMode::AnglesAndState),
                              perturb_T(a, 0.1, r2, PerturbMode::AnglesAndState)),
            0.0);
}

TEST(PerturbT, SecondOrderScoreLoss) {
  // mean loss ~ (sigma^2 / 2) tr(-H) with tr(-H) = 8 / sqrt 2 at the CHSH maximum
  const TorusPoint a{-kPi / 4, kPi / 2, kPi / 2};
  Rng rng(6);
  const double sigma = 0.01;
  double total = 0;
  for (int t = 0; t < 4000; ++t) total += 2 * kSqrt2 - score(XorGame::chsh(), perturb_T(a, sigma, rng, PerturbMode::AnglesOnly));
  const double expected = 0.5 * sigma * sigma * 8 / kSqrt2;
  EXPECT_NEAR(total / 4000, expected, 0.1 * expected);
}

TEST(DistanceToOptimal, OrbitIsZero) {
  const MaximaSet m = find_global_maxima(XorGame::chsh());
  const TorusPoint a{-kPi / 4, kPi / 2, kPi / 2};
  EXPECT_LE(distance_to_optimal(make_T_strategy(a), m), 1e-10);
  EXPECT_LE(distance_to_optimal(make_T_strategy(-a), m), 1e-10);
  EXPECT_GT(distance_to_optimal(make_T_strategy({0, 0, 0}), m), 0.1);
}
