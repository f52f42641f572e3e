#ifndef PCLQ_STRUCTURE_HPP_
#define PCLQ_STRUCTURE_HPP_

#include <vector>

#include <Eigen/Dense>

namespace pclq {

// Orthonormal basis of a subspace of R^d; the r = 0 case is a d x 0 matrix.
struct SubspaceBasis {
  Eigen::MatrixXd basis;  // d x r, orthonormal columns

  Eigen::Index ambient_dim() const { return basis.rows(); }
  Eigen::Index dim() const { return basis.cols(); }
  Eigen::MatrixXd projector() const { return basis * basis.transpose(); }
};

// Nested controllable / relevant decomposition of Prop.-style block systems:
// span(p_b) within span(p_c) within span(p_r).
struct PcPartition {
  SubspaceBasis p_b;  // input-column span
  SubspaceBasis p_c;  // controllable subspace
  SubspaceBasis p_r;  // relevant subspace (controllable + relevant disturbances)
  double residual = 0.0;  // block-form reconstruction residual
};

// Coordinate-aligned view of the block pattern: controllable coordinates,
// coordinates feeding them, and the untouched remainder.
struct SparsityBlocks {
  std::vector<int> block1;
  std::vector<int> block2;
  std::vector<int> block3;
};

// [B, AB, ..., A^{d-1}B]; higher powers are redundant by Cayley-Hamilton.
Eigen::MatrixXd controllability_matrix(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                       const Eigen::Ref<const Eigen::MatrixXd>& b);

// Number of singular values above tol_factor * max(rows, cols) * sigma_max.
Eigen::Index numeric_rank(const Eigen::Ref<const Eigen::MatrixXd>& m,
                          double tol_factor = 1e-9);

// Orthonormal basis of the column span of m at the rank tolerance.
SubspaceBasis column_span(const Eigen::Ref<const Eigen::MatrixXd>& m,
                          double tol_factor = 1e-9);

// Krylov matrix of the coupling seen by the complement of an invariant
// subspace: with the rotated representation [V_c | V_c-perp], returns
// [X12', X2' X12', ..., (X2')^{d-r} X12']. Raises InvariantViolation when
// p_c is not invariant under a at the working tolerance.
Eigen::MatrixXd relevant_disturbances_matrix(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                             const SubspaceBasis& p_c,
                                             double tol_factor = 1e-9);

// Smallest subspace containing the seed and closed under a, grown by
// orthogonalizing images of basis columns in deterministic order.
SubspaceBasis minimal_invariant_subspace(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                         const SubspaceBasis& seed,
                                         double tol_factor = 1e-9);

// p_b = span(B); p_c = MIS(A, p_b); p_r = MIS((I - P_c) A', p_c); residual
// measures how well the three-term block form reproduces A.
PcPartition pc_decompose(const Eigen::Ref<const Eigen::MatrixXd>& a,
                         const Eigen::Ref<const Eigen::MatrixXd>& b,
                         double tol_factor = 1e-9);

// Graph view of the coordinate couplings |A(i,j)| > zero_tol (edge j -> i):
// block1 is reachable from the row support of B, block2 is everything else
// with a directed path into block1, block3 the remainder.
SparsityBlocks block_partition_sparsity(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                        const Eigen::Ref<const Eigen::MatrixXd>& b,
                                        double zero_tol = 0.0);

// Max absolute row sum (the induced L-infinity norm).
double linf_block_norm(const Eigen::Ref<const Eigen::MatrixXd>& a3);

}  // namespace pclq

#endif  // PCLQ_STRUCTURE_HPP_
