#include "xorst/ghz_device.hpp"

#include "xorst/jordan.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace xorst {

namespace {

Eigen::Matrix2cd observable(int input, cd nu) {
  if (input == 0) return pauli_x();
  Eigen::Matrix2cd m;
  m << 0, nu, std::conj(nu), 0;
  return m;
}

MatC projector(const MatC& s, int outcome) {
  const MatC id = MatC::Identity(s.rows(), s.cols());
  return 0.5 * (id + (outcome ? -1.0 : 1.0) * s);
}

int bit(int value, int player) { return (value >> (2 - player)) & 1; }

// Branch (1/2) (Pi (x) Pi (x) Pi (x) I_E) psi for every admissible input and
// passing output; non-passing slots stay empty.
std::array<std::array<VecC, 8>, 4> branches(const RawREDevice& d) {
  std::vector<int> dims{d.dims[0], d.dims[1], d.dims[2], d.env_dim};
  std::array<std::array<VecC, 8>, 4> out;
  for (int ii = 0; ii < 4; ++ii) {
    const auto& in = ghz_inputs()[ii];
    for (int o = 0; o < 8; ++o) {
      if (!ghz_test(in, {bit(o, 0), bit(o, 1), bit(o, 2)})) continue;
      VecC v = d.state;
      for (int j = 0; j < 3; ++j) v = apply_local(v, dims, j, projector(d.observables[j][in[j]], bit(o, j)));
      out[ii][o] = 0.5 * v;
    }
  }
  return out;
}

RawREDevice raw_qubit(const VecC& alpha, const std::array<cd, 3>& nu) {
  RawREDevice r;
  r.dims = {2, 2, 2};
  for (int j = 0; j < 3; ++j) r.observables[j] = {MatC(observable(0, nu[j])), MatC(observable(1, nu[j]))};
  r.env_dim = 1;
  r.state = alpha;
  return r;
}

// Linear in alpha, so it also accepts unnormalized amplitudes.
VecC post_state_linear(const VecC& alpha, const std::array<cd, 3>& nu) {
  const auto br = branches(raw_qubit(alpha, nu));
  VecC v = VecC::Zero(256);
  for (int ii = 0; ii < 4; ++ii)
    for (int o = 0; o < 8; ++o)
      if (br[ii][o].size() > 0) v.segment(64 * ii + 8 * o, 8) = br[ii][o];
  return v;
}

cd unit_phase_of(cd z) { return std::abs(z) > 0 ? z / std::abs(z) : cd(1.0); }

VecC ideal_post_state() {
  const Qubit222Device id = ideal_device();
  return post_state_linear(id.state(), {id.lambda, id.gamma, id.phi});
}

}  // namespace

const std::array<std::array<int, 3>, 4>& ghz_inputs() {
  static const std::array<std::array<int, 3>, 4> in{{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
  return in;
}

bool ghz_test(const std::array<int, 3>& i, const std::array<int, 3>& o) {
  for (int x : i)
    if (x != 0 && x != 1) throw ValidationError("inputs must be bits");
  for (int x : o)
    if (x != 0 && x != 1) throw ValidationError("outputs must be bits");
  if ((i[0] ^ i[1] ^ i[2]) != 0) throw ValidationError("input string must have even parity");
  return ((o[0] ^ o[1] ^ o[2]) ^ (i[0] | i[1] | i[2])) == 1;
}

void Qubit222Device::validate(double tol) const {
  double n2 = 0.0;
  for (const cd& x : c) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw ValidationError("device amplitude not finite");
    n2 += std::norm(x);
  }
  if (std::abs(n2 - 1.0) > tol) throw ValidationError("device state is not normalized");
  for (const cd& nu : {lambda, gamma, phi}) {
    if (std::abs(std::abs(nu) - 1.0) > tol) throw ValidationError("device phase is not of unit modulus");
    if (nu.imag() < -tol) throw ValidationError("device phase must have non-negative imaginary part");
  }
}

VecC Qubit222Device::state() const {
  VecC v(8);
  for (int k = 0; k < 8; ++k) v(k) = c[k];
  return v;
}

Qubit222Device ideal_device() {
  Qubit222Device d;
  d.c[0] = 1.0 / std::sqrt(2.0);
  d.c[7] = -1.0 / std::sqrt(2.0);
  d.lambda = d.gamma = d.phi = kI;
  return d;
}

double pass_probability_formula(const Qubit222Device& d) {
  const cd l = d.lambda, g = d.gamma, f = d.phi;
  const cd gb = std::conj(g), fb = std::conj(f);
  const auto& c = d.c;
  // The low-index amplitude carries the conjugate; with the high-index one
  // conjugated instead the expression disagrees with the operator route for
  // complex amplitudes.
  double p = 0.5;
  p += (c[7] * std::conj(c[0]) * (-1.0 + l * g + g * f + f * l)).real() / 4.0;
  p += (c[6] * std::conj(c[1]) * (-1.0 + l * g + g * fb + fb * l)).real() / 4.0;
  p += (c[5] * std::conj(c[2]) * (-1.0 + l * gb + gb * f + f * l)).real() / 4.0;
  p += (c[4] * std::conj(c[3]) * (-1.0 + l * gb + gb * fb + fb * l)).real() / 4.0;
  return p;
}

double pass_probability_direct(const Qubit222Device& d) {
  d.validate();
  return pass_probability(raw_qubit(d.state(), {d.lambda, d.gamma, d.phi}));
}

PhaseBoundReport check_phase_bounds(const Qubit222Device& d) {
  PhaseBoundReport r;
  r.eps = 1.0 - pass_probability_direct(d);
  r.rhs = 16.0 * r.eps;
  const std::array<cd, 3> nu{d.lambda, d.gamma, d.phi};
  r.ok = true;
  for (int j = 0; j < 3; ++j) {
    r.lhs[j] = std::norm(nu[j] - kI);
    r.ok = r.ok && r.lhs[j] <= r.rhs + 1e-12;
  }
  return r;
}

StateBoundReport check_state_bounds(const Qubit222Device& d) {
  StateBoundReport r;
  r.eps = 1.0 - pass_probability_direct(d);
  const VecC a = d.state(), g = ideal_device().state();
  const cd ip = g.dot(a);  // <g, alpha> with the bra on g
  r.overlap = std::abs(ip);
  r.overlap_rhs = 1.0 - 7.0 * r.eps;
  r.zeta = unit_phase_of(ip);
  r.distance2 = (a - r.zeta * g).squaredNorm();
  r.distance2_rhs = 14.0 * r.eps;
  r.ok = r.overlap >= r.overlap_rhs - 1e-12 && r.distance2 <= r.distance2_rhs + 1e-12;
  return r;
}

VecC post_measurement_state(const Qubit222Device& d) {
  d.validate();
  return post_state_linear(d.state(), {d.lambda, d.gamma, d.phi});
}

PostStateBoundReport check_post_state_bound(const Qubit222Device& d) {
  PostStateBoundReport r;
  r.eps = 1.0 - pass_probability_direct(d);
  const VecC v = post_measurement_state(d), vi = ideal_post_state();
  r.zeta = unit_phase_of(vi.dot(v));
  r.value = (v - r.zeta * vi).squaredNorm();
  r.rhs = 150.0 * r.eps;
  r.ok = r.value <= r.rhs + 1e-12;
  return r;
}

double trace_distance(const MatC& rho, const MatC& sigma) {
  if (rho.rows() != sigma.rows() || rho.rows() != rho.cols() || sigma.rows() != sigma.cols())
    throw ValidationError("trace_distance: shape mismatch");
  for (const MatC* m : {&rho, &sigma}) {
    if (hermitian_defect(*m) > 1e-10) throw ValidationError("trace_distance: matrix is not Hermitian");
    if (std::abs(m->trace() - cd(1.0)) > 1e-10) throw ValidationError("trace_distance: trace is not 1");
  }
  return trace_norm_hermitian(rho - sigma);
}

std::array<int, 3> CanonicalREDevice::block_dims() const {
  return {static_cast<int>(phases[0].size()), static_cast<int>(phases[1].size()),
          static_cast<int>(phases[2].size())};
}

void CanonicalREDevice::validate(double tol) const {
  if (env_dim < 1 || env_dim > 4) throw ValidationError("environment dimension must be in [1, 4]");
  std::int64_t total = env_dim;
  for (const auto& p : phases) {
    if (p.empty()) throw ValidationError("every component needs at least one block");
    for (const cd& nu : p) {
      if (std::abs(std::abs(nu) - 1.0) > tol) throw ValidationError("block phase is not of unit modulus");
      if (nu.imag() < -tol) throw ValidationError("block phase must have non-negative imaginary part");
    }
    total *= 2 * static_cast<std::int64_t>(p.size());
  }
  if (total > (std::int64_t{1} << 14)) throw SizeLimitError("device dimension exceeds 2^14");
  if (state.size() != total) throw ValidationError("device state has the wrong length");
  if (std::abs(state.norm() - 1.0) > tol) throw ValidationError("device state is not normalized");
}

void RawREDevice::validate(double tol) const {
  if (env_dim < 1 || env_dim > 4) throw ValidationError("environment dimension must be in [1, 4]");
  std::int64_t total = env_dim;
  for (int j = 0; j < 3; ++j) {
    if (dims[j] < 1) throw ValidationError("component dimension must be positive");
    total *= dims[j];
    for (const MatC& m : observables[j]) {
      if (m.rows() != dims[j] || m.cols() != dims[j]) throw ValidationError("observable has the wrong size");
      if (involution_defect(m) > tol) throw ValidationError("observable is not a Hermitian involution");
    }
  }
  if (total > (std::int64_t{1} << 14)) throw SizeLimitError("device dimension exceeds 2^14");
  if (state.size() != total) throw ValidationError("device state has the wrong length");
  if (std::abs(state.norm() - 1.0) > tol) throw ValidationError("device state is not normalized");
}

RawREDevice to_raw(const CanonicalREDevice& d) {
  d.validate();
  RawREDevice r;
  r.env_dim = d.env_dim;
  r.state = d.state;
  for (int j = 0; j < 3; ++j) {
    const int m = static_cast<int>(d.phases[j].size());
    r.dims[j] = 2 * m;
    MatC s1 = MatC::Zero(2 * m, 2 * m);
    for (int a = 0; a < m; ++a) s1.block(2 * a, 2 * a, 2, 2) = observable(1, d.phases[j][a]);
    r.observables[j] = {kron(MatC::Identity(m, m), pauli_x()), s1};
  }
  return r;
}

double pass_probability(const RawREDevice& d) {
  d.validate();
  double p = 0.0;
  for (const auto& row : branches(d))
    for (const auto& v : row)
      if (v.size() > 0) p += v.squaredNorm();
  return p;
}

double pass_probability(const CanonicalREDevice& d) { return pass_probability(to_raw(d)); }

EntangledBoundReport check_entangled_bound(const CanonicalREDevice& d) {
  const RawREDevice raw = to_raw(d);
  const auto br = branches(raw);
  const int e = d.env_dim;
  EntangledBoundReport r;
  r.eps = 1.0 - pass_probability(raw);

  // Gamma^post on IO (x) E, io = 8 * input + output.
  const int nio = 32;
  std::vector<MatC> slot(nio);
  for (int io = 0; io < nio; ++io) {
    const VecC& b = br[io / 8][io % 8];
    if (b.size() > 0) slot[io] = Eigen::Map<const MatC>(b.data(), e, b.size() / e);
  }
  MatC gpost = MatC::Zero(nio * e, nio * e);
  for (int x = 0; x < nio; ++x)
    for (int y = 0; y < nio; ++y)
      if (slot[x].size() > 0 && slot[y].size() > 0) gpost.block(x * e, y * e, e, e) = slot[x] * slot[y].adjoint();

  const VecC vid = ideal_post_state();
  const MatC gideal = reduce_to_leading(vid, 8);
  const MatC gE = reduce_to_trailing(d.state, e);

  // w = sum_klmn |alpha_klmn| zeta_klmn (a_k b_l c_m f_n).
  const auto m = d.block_dims();
  VecC w = VecC::Zero(static_cast<Eigen::Index>(m[0]) * m[1] * m[2] * e);
  double vec2 = 0.0;
  const Eigen::Index s2 = 2 * m[2], s1 = 2 * m[1] * s2;
  for (int a = 0; a < m[0]; ++a)
    for (int b = 0; b < m[1]; ++b)
      for (int c = 0; c < m[2]; ++c)
        for (int f = 0; f < e; ++f) {
          VecC alpha(8);
          for (int r1 = 0; r1 < 2; ++r1)
            for (int r2 = 0; r2 < 2; ++r2)
              for (int r3 = 0; r3 < 2; ++r3)
                alpha(4 * r1 + 2 * r2 + r3) = d.state(((2 * a + r1) * s1 + (2 * b + r2) * s2 + (2 * c + r3)) * e + f);
          const VecC vb = post_state_linear(alpha, {d.phases[0][a], d.phases[1][b], d.phases[2][c]});
          const cd zeta = unit_phase_of(vid.dot(vb));
          const cd wv = alpha.norm() * zeta;
          w(((a * m[1] + b) * m[2] + c) * e + f) = wv;
          // The block's share of ||v_post - w (x) v_ideal||^2.
          vec2 += (vb - wv * vid).squaredNorm();
        }
  r.vector_bound = vec2;
  const MatC phiE = reduce_to_trailing(w, e);
  const double t600 = trace_norm_hermitian(gpost - kron(gideal, phiE));
  const double t2400 = trace_norm_hermitian(gpost - kron(gideal, gE));
  r.bound600 = t600 * t600;
  r.bound2400 = t2400 * t2400;
  const double slack = 1e-12;
  r.ok = r.vector_bound <= 150.0 * r.eps + slack && r.bound600 <= 600.0 * r.eps + slack &&
         r.bound2400 <= 2400.0 * r.eps + slack;
  return r;
}

CanonicalREDevice device_to_canonical(const RawREDevice& d) {
  d.validate();
  CanonicalREDevice out;
  out.env_dim = d.env_dim;
  std::vector<int> dims{d.dims[0], d.dims[1], d.dims[2], d.env_dim};
  VecC psi = d.state;
  for (int j = 0; j < 3; ++j) {
    // Block-major rows (2l + q) already match the (A R) layout.
    const BlockDecomposition bd = block_decompose({d.observables[j][0], d.observables[j][1]});
    for (const auto& b : bd.blocks) out.phases[j].push_back(std::polar(1.0, b.theta));
    psi = apply_local(psi, dims, j, bd.embedding);
    dims[j] = 2 * bd.m();
  }
  out.state = psi;
  out.validate();
  return out;
}

namespace {

cd random_phase(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < 0.5) return std::polar(1.0, kPi * u(rng));
  std::normal_distribution<double> n(0.0, std::pow(10.0, -4.0 * u(rng)));
  return std::polar(1.0, std::clamp(kPi / 2 + n(rng), 0.0, kPi));
}

VecC random_state_near(const VecC& ideal, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < 0.5) return random_unit_vector(static_cast<int>(ideal.size()), rng);
  VecC v = ideal + std::pow(10.0, -4.0 * u(rng)) * complex_gaussian(static_cast<int>(ideal.size()), rng);
  return v / v.norm();
}

}  // namespace

Qubit222Device random_device(Rng& rng) {
  Qubit222Device d;
  d.lambda = random_phase(rng);
  d.gamma = random_phase(rng);
  d.phi = random_phase(rng);
  const VecC v = random_state_near(ideal_device().state(), rng);
  for (int k = 0; k < 8; ++k) d.c[k] = v(k);
  return d;
}

CanonicalREDevice random_canonical_device(Rng& rng) {
  std::uniform_int_distribution<int> blocks(1, 2), env(1, 4);
  CanonicalREDevice d;
  d.env_dim = env(rng);
  std::array<int, 3> m{};
  for (int j = 0; j < 3; ++j) {
    m[j] = blocks(rng);
    for (int a = 0; a < m[j]; ++a) d.phases[j].push_back(random_phase(rng));
  }
  // Near-ideal qubit part entangled with random junk, then a global kick.
  const VecC junk = random_unit_vector(m[0] * m[1] * m[2] * d.env_dim, rng);
  const VecC g = ideal_device().state();
  const Eigen::Index s2 = 2 * m[2], s1 = 2 * m[1] * s2;
  d.state = VecC::Zero(2 * m[0] * s1 * d.env_dim);
  for (int a = 0; a < m[0]; ++a)
    for (int b = 0; b < m[1]; ++b)
      for (int c = 0; c < m[2]; ++c)
        for (int f = 0; f < d.env_dim; ++f)
          for (int r = 0; r < 8; ++r) {
            const int r1 = r >> 2, r2 = (r >> 1) & 1, r3 = r & 1;
            d.state(((2 * a + r1) * s1 + (2 * b + r2) * s2 + (2 * c + r3)) * d.env_dim + f) =
                junk(((a * m[1] + b) * m[2] + c) * d.env_dim + f) * g(r);
          }
  d.state = random_state_near(d.state, rng);
  return d;
}

}  // namespace xorst
