#include "xorst/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace xorst {

double wrap_angle(double x) {
  double r = std::remainder(x, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double circle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

double distance_to_pi_multiple(double x) { return std::abs(std::remainder(x, kPi)); }

MatC kron(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

VecC apply_local(const VecC& v, const std::vector<int>& dims, int axis, const MatC& op) {
  Eigen::Index left = 1, right = 1;
  for (int k = 0; k < axis; ++k) left *= dims[k];
  for (std::size_t k = axis + 1; k < dims.size(); ++k) right *= dims[k];
  const Eigen::Index mid = dims[axis];
  if (op.cols() != mid || v.size() != left * mid * right)
    throw ValidationError("apply_local: dimension mismatch");
  const Eigen::Index rows = op.rows();
  VecC out(left * rows * right);
  const MatC opt = op.transpose();
  for (Eigen::Index l = 0; l < left; ++l) {
    Eigen::Map<const MatC> in(v.data() + l * mid * right, right, mid);
    Eigen::Map<MatC> dst(out.data() + l * rows * right, right, rows);
    dst.noalias() = in * opt;
  }
  return out;
}

MatC reduce_to_trailing(const VecC& v, int trailing) {
  const Eigen::Index lead = v.size() / trailing;
  Eigen::Map<const MatC> m(v.data(), trailing, lead);  // m(t, l) = v[l * trailing + t]
  return m * m.adjoint();
}

MatC reduce_to_leading(const VecC& v, int trailing) {
  const Eigen::Index lead = v.size() / trailing;
  Eigen::Map<const MatC> m(v.data(), trailing, lead);
  return (m.adjoint() * m).transpose();
}

double spectral_norm(const MatC& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatC> svd(m);
  return svd.singularValues()(0);
}

double trace_norm_hermitian(const MatC& m) {
  Eigen::SelfAdjointEigenSolver<MatC> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double hermitian_defect(const MatC& m) { return spectral_norm(m - m.adjoint()); }

double involution_defect(const MatC& m) {
  const MatC id = MatC::Identity(m.rows(), m.cols());
  return std::max(hermitian_defect(m), spectral_norm(m * m - id));
}

VecC complex_gaussian(int d, Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  VecC v(d);
  for (int i = 0; i < d; ++i) v(i) = cd(n(rng), n(rng));
  return v;
}

MatC random_unitary(int d, Rng& rng) {
  MatC g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = complex_gaussian(d, rng);
  Eigen::HouseholderQR<MatC> qr(g);
  MatC q = qr.householderQ() * MatC::Identity(d, d);
  const MatC r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

VecC random_unit_vector(int d, Rng& rng) {
  VecC v = complex_gaussian(d, rng);
  return v / v.norm();
}

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd antidiag_phase(double theta) {
  Eigen::Matrix2cd m;
  m << 0, std::polar(1.0, theta), std::polar(1.0, -theta), 0;
  return m;
}

std::int64_t checked_pow(std::int64_t base, int exponent, std::int64_t limit) {
  std::int64_t r = 1;
  for (int i = 0; i < exponent; ++i) {
    if (r > limit / std::max<std::int64_t>(base, 1)) return limit + 1;
    r *= base;
  }
  return r;
}

}  // namespace xorst
