#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace xorst {

using cd = std::complex<double>;
using VecR = Eigen::VectorXd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cd kI{0.0, 1.0};

/// Malformed or out-of-domain input. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input exceeds a configured size guard.
class SizeLimitError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Operation refused because a mathematical precondition does not hold
/// (for example a robustness run on a game that is not a robust self-test).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double x);

/// |wrap(a - b)|, the distance on the circle.
double circle_distance(double a, double b);

/// Distance from x to the nearest multiple of pi.
double distance_to_pi_multiple(double x);

MatC kron(const MatC& a, const MatC& b);

/// Applies `op` (rows x dims[axis]) to tensor factor `axis` of `v`, where `v`
/// lives on the row-major product of `dims` (factor 0 most significant).
/// The returned vector lives on `dims` with dims[axis] replaced by op.rows().
VecC apply_local(const VecC& v, const std::vector<int>& dims, int axis, const MatC& op);

/// Reduced density matrix of the trailing factor of dimension `trailing`.
MatC reduce_to_trailing(const VecC& v, int trailing);

/// Reduced density matrix of the leading factor (trailing factor of
/// dimension `trailing` traced out).
MatC reduce_to_leading(const VecC& v, int trailing);

double spectral_norm(const MatC& m);

/// Sum of absolute eigenvalues of a Hermitian matrix (no 1/2 factor).
double trace_norm_hermitian(const MatC& m);

double hermitian_defect(const MatC& m);

/// max(||X - X^dagger||, ||X^2 - I||) in spectral norm.
double involution_defect(const MatC& m);

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
MatC random_unitary(int d, Rng& rng);

VecC random_unit_vector(int d, Rng& rng);

/// Complex standard Gaussian vector (real and imaginary parts N(0, 1/2)).
VecC complex_gaussian(int d, Rng& rng);

/// Pauli matrices in the convention used throughout the library.
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_z();

/// [[0, e^{i theta}], [e^{-i theta}, 0]].
Eigen::Matrix2cd antidiag_phase(double theta);

std::int64_t checked_pow(std::int64_t base, int exponent, std::int64_t limit);

}  // namespace xorst
