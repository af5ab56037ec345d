#include <gtest/gtest.h>

#include <algorithm>

#include "../oracles.hpp"
#include "xorst/jordan.hpp"

using namespace xorst;

namespace {

const double kSqrt2 = std::sqrt(2.0);

Eigen::Matrix2cd sigma_y() {
  Eigen::Matrix2cd y;
  y << 0, -kI, kI, 0;
  return y;
}

MatC projector(const VecC& v) { return v * v.adjoint() / v.squaredNorm(); }

double invariance_defect(const MatC& basis, const MatC& P) {
  const MatC Q = basis * basis.adjoint();
  return (P * Q - Q * P * Q).norm();
}

// Independent reconstruction check: U^dag X' U against the input.
double reconstruction(const InvolutionPair& p, const BlockDecomposition& bd) {
  const MatC& U = bd.embedding;
  const MatC X1c = canonical_X1(bd.m()), X2c = canonical_X2(bd.thetas());
  return std::max((U.adjoint() * X1c * U - p.X1).norm(), (U.adjoint() * X2c * U - p.X2).norm());
}

// The spectrum of X1 X2 is closed under conjugation, so real parts determine it.
std::vector<double> sorted_real_parts(const Eigen::VectorXcd& ev) {
  std::vector<double> a;
  for (const cd& z : ev) a.push_back(z.real());
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

TEST(InvariantSubspace, LemmaCases) {
  const VecC e0 = VecC::Unit(2, 0), e1 = VecC::Unit(2, 1);
  const VecC plus = (e0 + e1) / kSqrt2;
  auto s = invariant_subspace(projector(e0), projector(e0));
  EXPECT_EQ(s.basis.cols(), 1);
  EXPECT_NEAR(std::abs(s.basis.col(0).dot(e0)), 1.0, 1e-12);

  s = invariant_subspace(projector(e0), projector(e1));
  EXPECT_EQ(s.basis.cols(), 1);
  EXPECT_NEAR(std::abs(s.basis.col(0).dot(e0)), 1.0, 1e-12);
  EXPECT_EQ(s.kind, SubspaceCase::Orthogonal);

  s = invariant_subspace(projector(e0), projector(plus));
  EXPECT_EQ(s.basis.cols(), 2);
  EXPECT_EQ(s.kind, SubspaceCase::Plane);
}

TEST(InvariantSubspace, RandomProjectorsStayInvariant) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 7;
    const MatC X1 = oracle::random_involution(d, static_cast<int>(rng() % (d + 1)), rng);
    const MatC X2 = oracle::random_involution(d, static_cast<int>(rng() % (d + 1)), rng);
    const MatC I = MatC::Identity(d, d);
    const MatC P1 = (I + X1) / 2.0, P2 = (I + X2) / 2.0;
    const auto s = invariant_subspace(P1, P2);
    ASSERT_GE(s.basis.cols(), 1);
    ASSERT_LE(s.basis.cols(), 2);
    EXPECT_LE((s.basis.adjoint() * s.basis - MatC::Identity(s.basis.cols(), s.basis.cols())).norm(), 1e-10);
    EXPECT_LE(invariance_defect(s.basis, P1), 1e-9);
    EXPECT_LE(invariance_defect(s.basis, P2), 1e-9);
  }
}

TEST(BlockDecompose, PauliExamples) {
  const auto xy = block_decompose({pauli_x(), sigma_y()});
  ASSERT_EQ(xy.m(), 1);
  EXPECT_NEAR(xy.blocks[0].theta, kPi / 2, 1e-12);
  EXPECT_EQ(xy.blocks[0].origin, BlockOrigin::Genuine);
  EXPECT_LE(xy.residual, 1e-12);
  // the pi/2 block is sigma_y after the basis change sigma_z
  EXPECT_LE((MatC(pauli_z()) * canonical_X2({kPi / 2}) * MatC(pauli_z()) - MatC(sigma_y())).norm(), 1e-15);

  const auto xx = block_decompose({pauli_x(), pauli_x()});
  ASSERT_EQ(xx.m(), 1);
  EXPECT_NEAR(xx.blocks[0].theta, 0.0, 1e-12);
  EXPECT_EQ(xx.blocks[0].origin, BlockOrigin::PairedPieces);
  EXPECT_LE(xx.residual, 1e-12);
}

TEST(BlockDecompose, ScalarPairEmbedsWithOppositeSign) {
  MatC one(1, 1), minus(1, 1);
  one << 1;
  minus << -1;
  const auto bd = block_decompose({one, minus});
  ASSERT_EQ(bd.m(), 1);
  EXPECT_EQ(bd.blocks[0].origin, BlockOrigin::EmbeddedPiece);
  EXPECT_NEAR(bd.blocks[0].theta, kPi, 1e-12);  // X2' = -X1'
  // image lies in the +1 eigenspace of X1'
  const VecC img = bd.embedding.col(0);
  EXPECT_NEAR((canonical_X1(1) * img - img).norm(), 0.0, 1e-12);
  EXPECT_LE(reconstruction({one, minus}, bd), 1e-12);
}

TEST(BlockDecompose, RejectsNonInvolutions) {
  MatC a(2, 2);
  a << 1, 1, 1, 0;
  EXPECT_THROW(block_decompose({a, MatC(pauli_x())}), ValidationError);
  EXPECT_THROW(block_decompose({MatC(pauli_x()), MatC::Identity(3, 3)}), ValidationError);
}

TEST(BlockDecompose, RandomPairsAllDimensions) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + t % 16;
    const InvolutionPair p{oracle::random_involution(d, static_cast<int>(rng() % (d + 1)), rng),
                           oracle::random_involution(d, static_cast<int>(rng() % (d + 1)), rng)};
    const auto bd = block_decompose(p);
    EXPECT_LE(bd.residual, 1e-9);
    EXPECT_LE(bd.isometry_defect, 1e-10);
    EXPECT_LE(reconstruction(p, bd), 1e-9);
    EXPECT_EQ(bd.embedding.rows(), 2 * bd.m());
    EXPECT_GE(2 * bd.m(), d);
    for (const auto& b : bd.blocks) {
      EXPECT_GE(b.theta, 0.0);
      EXPECT_LE(b.theta, kPi);
    }
    // sorted by theta
    for (int l = 1; l < bd.m(); ++l) EXPECT_LE(bd.blocks[l - 1].theta, bd.blocks[l].theta);
  }
}

TEST(BlockDecompose, SpectrumOfProductMatchesBlocks) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) {
    const int d = 1 + t % 9;
    const InvolutionPair p{oracle::random_involution(d, static_cast<int>(rng() % (d + 1)), rng),
                           oracle::random_involution(d, static_cast<int>(rng() % (d + 1)), rng)};
    const auto bd = block_decompose(p);
    Eigen::ComplexEigenSolver<MatC> es(p.X1 * p.X2);
    std::vector<cd> expected;
    for (const auto& b : bd.blocks) {
      // X1' X2' on a block is diag(e^{-i theta}, e^{i theta}).
      if (b.origin == BlockOrigin::Genuine) {
        expected.push_back(std::polar(1.0, b.theta));
        expected.push_back(std::polar(1.0, -b.theta));
      } else {
        const int copies = b.origin == BlockOrigin::PairedPieces ? 2 : 1;
        for (int c = 0; c < copies; ++c) expected.push_back(std::polar(1.0, b.theta));
      }
    }
    Eigen::VectorXcd ev(static_cast<Eigen::Index>(expected.size()));
    for (std::size_t i = 0; i < expected.size(); ++i) ev(i) = expected[i];
    const auto a = sorted_real_parts(es.eigenvalues()), b = sorted_real_parts(ev);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(BlockDecompose, BuildThenRecoverThetas) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.05, kPi - 0.05);
  for (int t = 0; t < 30; ++t) {
    const int m = 1 + t % 8;
    std::vector<double> thetas(m);
    for (auto& x : thetas) x = u(rng);
    const MatC U = oracle::haar_unitary(2 * m, rng);
    const InvolutionPair p{U.adjoint() * canonical_X1(m) * U, U.adjoint() * canonical_X2(thetas) * U};
    auto got = block_decompose(p).thetas();
    std::sort(thetas.begin(), thetas.end());
    ASSERT_EQ(got.size(), thetas.size());
    for (int l = 0; l < m; ++l) EXPECT_NEAR(got[l], thetas[l], 1e-9);
  }
}

TEST(CanonicalForm, QubitStrategyIsAlreadyCanonical) {
  const TorusPoint a{0.2, 1.1, 2.3};
  const QubitStrategy t = make_T_strategy(a);
  const CanonicalStrategy cs = to_canonical_form(t.to_general());
  ASSERT_EQ(cs.players(), 2);
  EXPECT_EQ(cs.thetas[0].size(), 1u);
  EXPECT_NEAR(cs.thetas[0][0], 1.1, 1e-10);
  EXPECT_NEAR(cs.thetas[1][0], 2.3, 1e-10);
  const XorGame chsh = XorGame::chsh();
  EXPECT_NEAR(score(chsh, cs.to_general()), score(chsh, t), 1e-9);
}

TEST(CanonicalForm, AncillaAndRandomStrategiesPreserveScore) {
  std::mt19937_64 rng(5);
  Rng lib(5);
  const XorGame chsh = XorGame::chsh();
  for (int t = 0; t < 10; ++t) {
    GeneralStrategy s;
    s.dims = {4, 4};
    s.state = random_unit_vector(16, lib);
    for (int k = 0; k < 2; ++k)
      s.measurements.push_back({oracle::random_involution(4, static_cast<int>(rng() % 5), rng),
                                oracle::random_involution(4, static_cast<int>(rng() % 5), rng)});
    const CanonicalStrategy cs = to_canonical_form(s);
    EXPECT_NEAR(score(chsh, cs.to_general()), score(chsh, s), 1e-9);
    EXPECT_NEAR(cs.state.norm(), 1.0, 1e-12);
    for (const auto& th : cs.thetas)
      for (double x : th) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, kPi);
      }
  }
  // qubit strategy (x) idle ancilla per player
  const QubitStrategy q = make_T_strategy({-kPi / 4, kPi / 2, kPi / 2});
  GeneralStrategy s;
  s.dims = {4, 4};
  const VecC anc = random_unit_vector(2, lib);
  // layout: player factors (qubit, ancilla) each
  VecC big = VecC::Zero(16);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) big((2 * a + x) * 4 + 2 * b + y) = q.state(2 * a + b) * anc(x) * anc(y);
  s.state = big;
  for (int k = 0; k < 2; ++k)
    s.measurements.push_back({kron(q.measurements[k][0], MatC::Identity(2, 2)), kron(q.measurements[k][1], MatC::Identity(2, 2))});
  const CanonicalStrategy cs = to_canonical_form(s);
  EXPECT_EQ(cs.thetas[0].size(), 2u);
  EXPECT_NEAR(score(chsh, cs.to_general()), 2 * kSqrt2, 1e-9);
}

TEST(DecomposeCanonical, WeightsFormDistribution) {
  Rng rng(6);
  const XorGame chsh = XorGame::chsh();
  for (int t = 0; t < 20; ++t) {
    CanonicalStrategy cs;
    std::uniform_real_distribution<double> u(0, kPi);
    cs.thetas = {{u(rng), u(rng)}, {u(rng), u(rng), u(rng)}};
    cs.state = random_unit_vector(4 * 6, rng);
    double w = 0, sc = 0;
    for (const auto& c : decompose_canonical(chsh, cs)) {
      w += std::norm(c.coefficient);
      sc += std::norm(c.coefficient) * c.score;
      EXPECT_GE(c.qubit_state(0).real(), -1e-12);
      EXPECT_LE(std::abs(c.qubit_state(0).imag()), 1e-12);
    }
    EXPECT_NEAR(w, 1.0, 1e-10);
    EXPECT_NEAR(sc, score(chsh, cs.to_general()), 1e-9);
  }
  CanonicalStrategy single;
  single.thetas = {{1.0}, {2.0}};
  single.state = random_unit_vector(4, rng);
  const auto comps = decompose_canonical(chsh, single);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_NEAR(std::norm(comps[0].coefficient), 1.0, 1e-12);
}

TEST(NearestIdealProduct, ExactProductAndChshState) {
  const XorGame chsh = XorGame::chsh();
  const MaximaSet m = find_global_maxima(chsh);
  // g = (|00> + e^{-i pi/4}|11>)/sqrt 2: P(i, i) = 2 + 2i and theta_0 = -arg P
  VecC g = VecC::Zero(4);
  g(0) = 1 / kSqrt2;
  g(3) = std::polar(1 / kSqrt2, -kPi / 4);
  Rng rng(7);
  CanonicalStrategy cs;
  cs.thetas = {{kPi / 2, kPi / 2}, {kPi / 2, kPi / 2}};
  const VecC w1 = random_unit_vector(2, rng), w2 = random_unit_vector(2, rng);
  // state index (q1 m1 + l1) * 4 + (q2 m2 + l2)
  VecC st = VecC::Zero(16);
  for (int q1 = 0; q1 < 2; ++q1)
    for (int q2 = 0; q2 < 2; ++q2)
      for (int l1 = 0; l1 < 2; ++l1)
        for (int l2 = 0; l2 < 2; ++l2) st((2 * q1 + l1) * 4 + 2 * q2 + l2) = g(2 * q1 + q2) * w1(l1) * w2(l2);
  cs.state = st;
  const IdealProduct ip = nearest_ideal_product(chsh, cs, m);
  EXPECT_LE((ip.ideal - g).norm(), 1e-9);
  EXPECT_LE(ip.distance, 1e-9);
  EXPECT_LE(ip.distance, ip.bound + 1e-9);
}

TEST(NearestIdealProduct, DistanceBoundedByComponentChain) {
  const XorGame chsh = XorGame::chsh();
  const MaximaSet m = find_global_maxima(chsh);
  Rng rng(8);
  std::uniform_real_distribution<double> u(0, kPi);
  for (int t = 0; t < 20; ++t) {
    CanonicalStrategy cs;
    cs.thetas = {{u(rng), u(rng)}, {u(rng)}};
    cs.state = random_unit_vector(8, rng);
    const IdealProduct ip = nearest_ideal_product(chsh, cs, m);
    EXPECT_LE(ip.distance, ip.bound + 1e-9);
    EXPECT_NEAR(ip.junk.norm(), 1.0, 1e-9);
  }
}
