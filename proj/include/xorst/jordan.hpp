#pragma once

#include <string>
#include <vector>

#include "xorst/strategy.hpp"

namespace xorst {

struct InvolutionPair {
  MatC X1;
  MatC X2;

  int dim() const { return static_cast<int>(X1.rows()); }
  /// Throws ValidationError if the sizes differ or either matrix is further
  /// than `tol` from a Hermitian involution.
  void validate(double tol = 1e-8) const;
};

enum class SubspaceCase {
  Orthogonal,  // ranges orthogonal: one vector suffices
  Shared,      // ranges share a unit vector
  Plane,       // span of the best-aligned pair
  Fallback,    // a projector is zero
};

struct InvariantSubspace {
  MatC basis;  // orthonormal columns, 1 or 2 of them
  SubspaceCase kind;
};

/// Subspace of dimension <= 2 invariant under both orthogonal projectors.
InvariantSubspace invariant_subspace(const MatC& P1, const MatC& P2, double tol = 1e-8);

enum class BlockOrigin {
  Genuine,        // two-dimensional irreducible block
  PairedPieces,   // two joint eigenvectors sharing a block
  EmbeddedPiece,  // one joint eigenvector padded to a block
};

std::string to_string(BlockOrigin o);

struct Block {
  double theta;  // in [0, pi]
  BlockOrigin origin;
};

/// X1 ~ (+)_l sigma_x and X2 ~ (+)_l antidiag(e^{i theta_l}, e^{-i theta_l})
/// via an isometry into C^{2m}, rows (2l, 2l+1) belonging to block l.
struct BlockDecomposition {
  std::vector<Block> blocks;
  MatC embedding;  // 2m x d, U^dag U = I
  double isometry_defect = 0.0;
  double residual = 0.0;  // max_j ||U^dag X'_j U - X_j||

  int m() const { return static_cast<int>(blocks.size()); }
  std::vector<double> thetas() const;
};

BlockDecomposition block_decompose(const InvolutionPair& pair);

/// Block-diagonal canonical observables in the block-major layout.
MatC canonical_X1(int m);
MatC canonical_X2(const std::vector<double>& thetas);

/// Strategy on (x)_k (C^2 (x) C^{m_k}); in each factor the qubit index is
/// the more significant one (index q * m_k + l).
struct CanonicalStrategy {
  std::vector<std::vector<double>> thetas;  // per player, per block
  VecC state;

  int players() const { return static_cast<int>(thetas.size()); }
  std::vector<int> dims() const;
  GeneralStrategy to_general() const;
};

/// Per-player block decomposition and transport of the state. Each player's
/// dimension is limited to 32 and all products to 2^16.
CanonicalStrategy to_canonical_form(const GeneralStrategy& s);

struct CanonicalComponent {
  std::vector<int> blocks;  // l_1, ..., l_n
  cd coefficient;           // p_l, phase chosen so <lambda|0..0> >= 0
  VecC qubit_state;         // lambda_l, unit (or |0..0> when p_l = 0)
  double score = 0.0;       // score of the qubit strategy at this block tuple
};

/// state = sum_l p_l lambda_l (x) w_l; sum |p_l|^2 score_l = total score.
std::vector<CanonicalComponent> decompose_canonical(const XorGame& game, const CanonicalStrategy& s);

struct IdealProduct {
  VecC ideal;  // optimal qubit state g
  VecC junk;   // gamma = sum p_l w_l
  double distance = 0.0;  // ||state - g (x) gamma||
  double bound = 0.0;     // sqrt(sum |p_l|^2 ||lambda_l - g||^2)
};

/// Product of the optimal qubit state and a junk state close to `s`. Needs a
/// maximum whose spatial angles lie all in (0, pi) or all in (-pi, 0).
IdealProduct nearest_ideal_product(const XorGame& game, const CanonicalStrategy& s, const MaximaSet& maxima);

}  // namespace xorst
