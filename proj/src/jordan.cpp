#include "xorst/jordan.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace xorst {

void InvolutionPair::validate(double tol) const {
  if (X1.rows() != X1.cols() || X2.rows() != X2.cols() || X1.rows() != X2.rows())
    throw ValidationError("involution pair: matrices must be square of equal size");
  if (X1.rows() < 1) throw ValidationError("involution pair: empty matrices");
  if (involution_defect(X1) > tol) throw ValidationError("X1 is not a Hermitian involution");
  if (involution_defect(X2) > tol) throw ValidationError("X2 is not a Hermitian involution");
}

namespace {

MatC range_basis(const MatC& p) {
  Eigen::SelfAdjointEigenSolver<MatC> es(0.5 * (p + p.adjoint()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
  MatC b(p.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) b.col(j) = es.eigenvectors().col(keep[j]);
  return b;
}

}  // namespace

InvariantSubspace invariant_subspace(const MatC& P1, const MatC& P2, double tol) {
  if (P1.rows() != P2.rows() || P1.rows() != P1.cols() || P2.rows() != P2.cols() || P1.rows() < 1)
    throw ValidationError("projectors must be square of equal size");
  for (const MatC* p : {&P1, &P2})
    if (hermitian_defect(*p) > tol || spectral_norm(MatC(*p * *p - *p)) > tol)
      throw ValidationError("input is not an orthogonal projector");
  const MatC b1 = range_basis(P1), b2 = range_basis(P2);
  const Eigen::Index d = P1.rows();
  if (b1.cols() == 0 || b2.cols() == 0) {
    const MatC& other = b1.cols() == 0 ? b2 : b1;
    MatC v = MatC::Zero(d, 1);
    if (other.cols() > 0)
      v.col(0) = other.col(0);
    else
      v(0, 0) = 1.0;
    return {v, SubspaceCase::Fallback};
  }
  Eigen::JacobiSVD<MatC> svd(b1.adjoint() * b2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double s = svd.singularValues()(0);
  const VecC v1 = b1 * svd.matrixU().col(0);
  const VecC v2 = b2 * svd.matrixV().col(0);
  if (s <= tol) return {MatC(v1), SubspaceCase::Orthogonal};
  if (s >= 1.0 - tol) return {MatC(v1), SubspaceCase::Shared};
  MatC basis(d, 2);
  basis.col(0) = v1;
  VecC w = v2 - v1.dot(v2) * v1;
  basis.col(1) = w / w.norm();
  return {basis, SubspaceCase::Plane};
}

std::string to_string(BlockOrigin o) {
  switch (o) {
    case BlockOrigin::Genuine:
      return "genuine";
    case BlockOrigin::PairedPieces:
      return "paired";
    case BlockOrigin::EmbeddedPiece:
      return "embedded";
  }
  return "unknown";
}

std::vector<double> BlockDecomposition::thetas() const {
  std::vector<double> t;
  for (const auto& b : blocks) t.push_back(b.theta);
  return t;
}

MatC canonical_X1(int m) {
  MatC x = MatC::Zero(2 * m, 2 * m);
  for (int l = 0; l < m; ++l) x.block(2 * l, 2 * l, 2, 2) = pauli_x();
  return x;
}

MatC canonical_X2(const std::vector<double>& thetas) {
  const int m = static_cast<int>(thetas.size());
  MatC x = MatC::Zero(2 * m, 2 * m);
  for (int l = 0; l < m; ++l) x.block(2 * l, 2 * l, 2, 2) = antidiag_phase(thetas[l]);
  return x;
}

namespace {

// Below this coupling a +1 eigenvector of X1 is treated as a joint eigenvector.
constexpr double kCouplingFloor = 1e-10;

struct PendingBlock {
  Block block;
  VecC e1, e2;  // images of the two canonical basis vectors
};

struct Piece {
  VecC v;
  int x1, x2;
};

MatC hermitian_part(const MatC& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

BlockDecomposition block_decompose(const InvolutionPair& pair) {
  pair.validate();
  const int d = pair.dim();
  const double r2 = 1.0 / std::sqrt(2.0);
  Eigen::SelfAdjointEigenSolver<MatC> ex(hermitian_part(pair.X1));
  std::vector<Eigen::Index> neg, pos;
  for (Eigen::Index i = 0; i < d; ++i) (ex.eigenvalues()(i) < 0 ? neg : pos).push_back(i);
  MatC bm(d, static_cast<Eigen::Index>(neg.size())), bp(d, static_cast<Eigen::Index>(pos.size()));
  for (std::size_t j = 0; j < neg.size(); ++j) bm.col(j) = ex.eigenvectors().col(neg[j]);
  for (std::size_t j = 0; j < pos.size(); ++j) bp.col(j) = ex.eigenvectors().col(pos[j]);

  std::vector<PendingBlock> out;
  std::vector<Piece> pieces;
  MatC partner_coords(bm.cols(), 0);

  if (bp.cols() > 0) {
    Eigen::SelfAdjointEigenSolver<MatC> ea(hermitian_part(bp.adjoint() * pair.X2 * bp));
    for (Eigen::Index l = 0; l < bp.cols(); ++l) {
      const double c = ea.eigenvalues()(l);
      const VecC u = bp * ea.eigenvectors().col(l);
      const VecC k = bm.cols() > 0 ? VecC(bm.adjoint() * (pair.X2 * u)) : VecC(0);
      const double s = k.size() > 0 ? k.norm() : 0.0;
      if (s > kCouplingFloor) {
        // X2 u = c u + i s w.
        const VecC w = -kI * (bm * k) / s;
        out.push_back({{std::atan2(s, c), BlockOrigin::Genuine}, r2 * (u + w), r2 * (u - w)});
        partner_coords.conservativeResize(Eigen::NoChange, partner_coords.cols() + 1);
        partner_coords.col(partner_coords.cols() - 1) = k / s;
      } else {
        pieces.push_back({u, +1, c >= 0 ? +1 : -1});
      }
    }
  }
  if (bm.cols() > partner_coords.cols()) {
    // Orthonormal complement of the genuine partners inside the -1 eigenspace.
    MatC comp;
    if (partner_coords.cols() == 0) {
      comp = MatC::Identity(bm.cols(), bm.cols());
    } else {
      Eigen::HouseholderQR<MatC> qr(partner_coords);
      const MatC q = qr.householderQ() * MatC::Identity(bm.cols(), bm.cols());
      comp = q.rightCols(bm.cols() - partner_coords.cols());
    }
    const MatC bc = bm * comp;
    Eigen::SelfAdjointEigenSolver<MatC> ec(hermitian_part(bc.adjoint() * pair.X2 * bc));
    for (Eigen::Index l = 0; l < bc.cols(); ++l)
      pieces.push_back({bc * ec.eigenvectors().col(l), -1, ec.eigenvalues()(l) >= 0 ? +1 : -1});
  }

  // Joint eigenvectors: pair a +1 and a -1 eigenvector of X1 with the same
  // product x1 * x2; leftovers are embedded one per block.
  for (int c : {+1, -1}) {
    std::vector<const Piece*> plus, minus;
    for (const auto& p : pieces)
      if (p.x1 * p.x2 == c) (p.x1 > 0 ? plus : minus).push_back(&p);
    const double theta = c > 0 ? 0.0 : kPi;
    const std::size_t paired = std::min(plus.size(), minus.size());
    for (std::size_t j = 0; j < paired; ++j)
      out.push_back({{theta, BlockOrigin::PairedPieces}, r2 * (plus[j]->v + minus[j]->v),
                     r2 * (plus[j]->v - minus[j]->v)});
    for (std::size_t j = paired; j < plus.size(); ++j)
      out.push_back({{theta, BlockOrigin::EmbeddedPiece}, r2 * plus[j]->v, r2 * plus[j]->v});
    for (std::size_t j = paired; j < minus.size(); ++j)
      out.push_back({{theta, BlockOrigin::EmbeddedPiece}, r2 * minus[j]->v, -r2 * minus[j]->v});
  }

  std::stable_sort(out.begin(), out.end(), [](const PendingBlock& a, const PendingBlock& b) {
    if (a.block.theta != b.block.theta) return a.block.theta < b.block.theta;
    return a.block.origin < b.block.origin;
  });

  BlockDecomposition bd;
  const int m = static_cast<int>(out.size());
  bd.embedding = MatC::Zero(2 * m, d);
  for (int l = 0; l < m; ++l) {
    bd.blocks.push_back(out[l].block);
    bd.embedding.row(2 * l) = out[l].e1.adjoint();
    bd.embedding.row(2 * l + 1) = out[l].e2.adjoint();
  }
  const MatC& u = bd.embedding;
  bd.isometry_defect = spectral_norm(MatC(u.adjoint() * u - MatC::Identity(d, d)));
  bd.residual = std::max(spectral_norm(MatC(u.adjoint() * canonical_X1(m) * u - pair.X1)),
                         spectral_norm(MatC(u.adjoint() * canonical_X2(bd.thetas()) * u - pair.X2)));
  return bd;
}

std::vector<int> CanonicalStrategy::dims() const {
  std::vector<int> d;
  for (const auto& t : thetas) d.push_back(2 * static_cast<int>(t.size()));
  return d;
}

GeneralStrategy CanonicalStrategy::to_general() const {
  GeneralStrategy g;
  g.dims = dims();
  g.state = state;
  for (const auto& t : thetas) {
    const int m = static_cast<int>(t.size());
    MatC proj_sum = MatC::Zero(2 * m, 2 * m);
    for (int l = 0; l < m; ++l) {
      MatC e = MatC::Zero(m, m);
      e(l, l) = 1.0;
      proj_sum += kron(antidiag_phase(t[l]), e);
    }
    g.measurements.push_back({kron(pauli_x(), MatC::Identity(m, m)), proj_sum});
  }
  return g;
}

CanonicalStrategy to_canonical_form(const GeneralStrategy& s) {
  s.validate();
  for (int d : s.dims)
    if (d > 32) throw SizeLimitError("per-player dimension above 32");
  CanonicalStrategy cs;
  VecC psi = s.state;
  std::vector<int> dims = s.dims;
  std::int64_t total = 1;
  for (int k = 0; k < s.players(); ++k) {
    const BlockDecomposition bd = block_decompose({s.measurements[k][0], s.measurements[k][1]});
    const int m = bd.m();
    total *= 2 * m;
    if (total > (std::int64_t{1} << 16)) throw SizeLimitError("canonical strategy dimension exceeds 2^16");
    // Block-major (l, q) rows to qubit-major (q, l).
    MatC u(2 * m, bd.embedding.cols());
    for (int l = 0; l < m; ++l)
      for (int q = 0; q < 2; ++q) u.row(q * m + l) = bd.embedding.row(2 * l + q);
    psi = apply_local(psi, dims, k, u);
    dims[k] = 2 * m;
    cs.thetas.push_back(bd.thetas());
  }
  cs.state = psi;
  return cs;
}

namespace {

std::size_t flat_index(const std::vector<int>& ms, const std::vector<int>& q, const std::vector<int>& l) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < ms.size(); ++k) idx = idx * (2 * ms[k]) + q[k] * ms[k] + l[k];
  return idx;
}

}  // namespace

std::vector<CanonicalComponent> decompose_canonical(const XorGame& game, const CanonicalStrategy& s) {
  const int n = s.players();
  if (game.players() != n) throw ValidationError("strategy and game disagree on the player count");
  std::vector<int> ms;
  std::int64_t tuples = 1, total = 1;
  for (const auto& t : s.thetas) {
    if (t.empty()) throw ValidationError("every player needs at least one block");
    ms.push_back(static_cast<int>(t.size()));
    tuples *= ms.back();
    total *= 2 * ms.back();
  }
  if (s.state.size() != total) throw ValidationError("canonical state has the wrong length");
  std::vector<CanonicalComponent> comps;
  std::vector<int> l(n, 0), q(n, 0);
  const std::size_t nq = std::size_t{1} << n;
  for (std::int64_t t = 0; t < tuples; ++t) {
    std::int64_t rem = t;
    for (int k = n - 1; k >= 0; --k) {
      l[k] = static_cast<int>(rem % ms[k]);
      rem /= ms[k];
    }
    VecC v(nq);
    for (std::size_t a = 0; a < nq; ++a) {
      for (int k = 0; k < n; ++k) q[k] = static_cast<int>((a >> (n - 1 - k)) & 1u);
      v(a) = s.state(flat_index(ms, q, l));
    }
    CanonicalComponent c;
    c.blocks = l;
    const double norm = v.norm();
    if (norm == 0.0) {
      c.coefficient = 0.0;
      c.qubit_state = VecC::Unit(nq, 0);
    } else {
      const cd phase = std::abs(v(0)) > 0 ? v(0) / std::abs(v(0)) : cd(1.0);
      c.coefficient = norm * phase;
      c.qubit_state = v / c.coefficient;
    }
    std::vector<double> th(n);
    for (int k = 0; k < n; ++k) th[k] = s.thetas[k][l[k]];
    QubitStrategy qs;
    qs.state = c.qubit_state;
    for (double x : th) qs.measurements.push_back({pauli_x(), antidiag_phase(x)});
    c.score = score(game, qs);
    comps.push_back(std::move(c));
  }
  return comps;
}

IdealProduct nearest_ideal_product(const XorGame& game, const CanonicalStrategy& s, const MaximaSet& maxima) {
  const int n = s.players();
  std::optional<TorusPoint> alpha;
  for (const auto& m : maxima.maxima) {
    bool all_pos = true, all_neg = true;
    for (int k = 1; k <= n; ++k) {
      const double a = m.point[k];
      all_pos = all_pos && a > 0 && a < kPi;
      all_neg = all_neg && a < 0 && a > -kPi;
    }
    if (all_pos) alpha = m.point;
    if (all_neg) alpha = -m.point;
    if (alpha) break;
  }
  if (!alpha)
    throw PreconditionError("no maximum lies in a sign quadrant; normalize the game with transform_game first");
  const cd p = eval_P_on_circle(game, *alpha);
  if (std::abs(p) < 1e-9) throw PreconditionError("|P_f| vanishes at the maximum");

  const std::size_t nq = std::size_t{1} << n;
  IdealProduct out;
  out.ideal = VecC::Zero(nq);
  out.ideal(0) = 1.0 / std::sqrt(2.0);
  out.ideal(nq - 1) = std::conj(p) / std::abs(p) / std::sqrt(2.0);

  const auto comps = decompose_canonical(game, s);
  out.junk = VecC(comps.size());
  double bound2 = 0.0;
  for (std::size_t t = 0; t < comps.size(); ++t) {
    out.junk(t) = comps[t].coefficient;
    bound2 += std::norm(comps[t].coefficient) * (comps[t].qubit_state - out.ideal).squaredNorm();
  }
  std::vector<int> ms;
  for (const auto& th : s.thetas) ms.push_back(static_cast<int>(th.size()));
  double dist2 = 0.0;
  std::vector<int> q(n);
  for (std::size_t t = 0; t < comps.size(); ++t) {
    for (std::size_t a = 0; a < nq; ++a) {
      for (int k = 0; k < n; ++k) q[k] = static_cast<int>((a >> (n - 1 - k)) & 1u);
      dist2 += std::norm(s.state(flat_index(ms, q, comps[t].blocks)) - out.ideal(a) * out.junk(t));
    }
  }
  out.distance = std::sqrt(dist2);
  out.bound = std::sqrt(bound2);
  return out;
}

}  // namespace xorst
