#pragma once

#include <array>
#include <vector>

#include "xorst/linalg.hpp"

namespace xorst {

/// Three-qubit device for the three-player GHZ test. Amplitude c[k] belongs
/// to |abc> with k = 4a + 2b + c. Player j measures sigma_x on input 0 and
/// [[0, nu_j], [conj(nu_j), 0]] on input 1, nu = (lambda, gamma, phi).
struct Qubit222Device {
  std::array<cd, 8> c{};
  cd lambda{0, 1};
  cd gamma{0, 1};
  cd phi{0, 1};

  /// Unit state, unit-modulus phases with Im >= 0.
  void validate(double tol = 1e-9) const;
  VecC state() const;
};

/// Inputs must be one of 000, 011, 101, 110. Passes iff
/// o1 ^ o2 ^ o3 ^ (i1 | i2 | i3) == 1.
bool ghz_test(const std::array<int, 3>& inputs, const std::array<int, 3>& outputs);

/// The four admissible input strings in register order.
const std::array<std::array<int, 3>, 4>& ghz_inputs();

Qubit222Device ideal_device();

/// Closed-form expression in the amplitudes and phases.
double pass_probability_formula(const Qubit222Device& d);

/// Uniform input over the four admissible strings, sum of projector weights.
double pass_probability_direct(const Qubit222Device& d);

struct PhaseBoundReport {
  double eps = 0.0;
  std::array<double, 3> lhs{};  // |nu_j - i|^2
  double rhs = 0.0;             // 16 eps
  bool ok = false;
};

PhaseBoundReport check_phase_bounds(const Qubit222Device& d);

struct StateBoundReport {
  double eps = 0.0;
  double overlap = 0.0;      // |<alpha, g>|
  double overlap_rhs = 0.0;  // 1 - 7 eps
  cd zeta{1, 0};
  double distance2 = 0.0;      // ||alpha - zeta g||^2
  double distance2_rhs = 0.0;  // 14 eps
  bool ok = false;
};

StateBoundReport check_state_bounds(const Qubit222Device& d);

/// Passing branch of the measured device on I (x) O (x) R with dims 4, 8, 8
/// (index 64 i + 8 o + r). Each branch carries amplitude 1/2 so the squared
/// norm is the pass probability.
VecC post_measurement_state(const Qubit222Device& d);

struct PostStateBoundReport {
  double eps = 0.0;
  double value = 0.0;  // ||v - zeta v_ideal||^2
  double rhs = 0.0;    // 150 eps
  cd zeta{1, 0};
  bool ok = false;
};

PostStateBoundReport check_post_state_bound(const Qubit222Device& d);

/// Trace norm of the difference (sum of |eigenvalues|, no 1/2). Both inputs
/// must be Hermitian with unit trace.
double trace_distance(const MatC& rho, const MatC& sigma);

/// Device whose component j acts on C^{d_j} (x) C^2 (block index more
/// significant) with one phase per block, plus an environment of dimension
/// env_dim. State layout: (A R1) (B R2) (C R3) E.
struct CanonicalREDevice {
  std::array<std::vector<cd>, 3> phases;
  int env_dim = 1;
  VecC state;

  std::array<int, 3> block_dims() const;
  void validate(double tol = 1e-9) const;
};

/// Arbitrary device: component j has +-1 observables on C^{dims[j]}.
struct RawREDevice {
  std::array<int, 3> dims{};
  std::array<std::array<MatC, 2>, 3> observables;
  int env_dim = 1;
  VecC state;

  void validate(double tol = 1e-8) const;
};

RawREDevice to_raw(const CanonicalREDevice& d);
double pass_probability(const RawREDevice& d);
double pass_probability(const CanonicalREDevice& d);

struct EntangledBoundReport {
  double eps = 0.0;
  double vector_bound = 0.0;  // ||v_post - w (x) v_ideal||^2, vs 150 eps
  double bound600 = 0.0;      // ||G_post - Phi_E (x) G_ideal||_1^2
  double bound2400 = 0.0;     // ||G_post - G_E (x) G_ideal||_1^2
  bool ok = false;
};

EntangledBoundReport check_entangled_bound(const CanonicalREDevice& d);

/// Block decomposition of every component; phases come out with Im >= 0.
CanonicalREDevice device_to_canonical(const RawREDevice& d);

/// Random device: phases e^{i theta}, theta in [0, pi], and a state, each
/// drawn either uniformly or near the ideal with probability 1/2.
Qubit222Device random_device(Rng& rng);

/// Random purified canonical device with 1 or 2 blocks per component and an
/// environment of dimension 1..4, biased towards the ideal.
CanonicalREDevice random_canonical_device(Rng& rng);

}  // namespace xorst
