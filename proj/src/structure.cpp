#include "pclq/structure.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pclq/errors.hpp"

namespace pclq {

namespace {

// Column-append tolerance shared by the subspace routines; scale-invariant
// in A so that rescaling the dynamics does not change detected dimensions.
double subspace_tolerance(const Eigen::Ref<const Eigen::MatrixXd>& a,
                          double tol_factor) {
  return tol_factor * static_cast<double>(std::max<Eigen::Index>(a.rows(), 1)) *
         std::max(a.norm(), 1.0);
}

double invariance_residual(const Eigen::Ref<const Eigen::MatrixXd>& a,
                           const SubspaceBasis& v) {
  if (v.dim() == 0) return 0.0;
  const Eigen::MatrixXd image = a * v.basis;
  return (image - v.basis * (v.basis.transpose() * image)).norm();
}

}  // namespace

Eigen::MatrixXd controllability_matrix(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                       const Eigen::Ref<const Eigen::MatrixXd>& b) {
  require(a.rows() == a.cols(), ErrorCode::kShapeMismatch, "A must be square");
  require(b.rows() == a.rows(), ErrorCode::kShapeMismatch,
          "B must have as many rows as A");
  const Eigen::Index d = a.rows();
  const Eigen::Index du = b.cols();
  Eigen::MatrixXd gamma(d, d * du);
  if (du == 0 || d == 0) return gamma;
  gamma.leftCols(du) = b;
  for (Eigen::Index i = 1; i < d; ++i) {
    gamma.middleCols(i * du, du) = a * gamma.middleCols((i - 1) * du, du);
  }
  return gamma;
}

Eigen::Index numeric_rank(const Eigen::Ref<const Eigen::MatrixXd>& m,
                          double tol_factor) {
  require(tol_factor > 0.0, ErrorCode::kBadArgument, "tol_factor must be positive");
  require(m.allFinite(), ErrorCode::kNonFinite, "matrix contains NaN or Inf entries");
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double threshold =
      tol_factor * static_cast<double>(std::max(m.rows(), m.cols())) * sigma(0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > threshold) ++rank;
  return rank;
}

SubspaceBasis column_span(const Eigen::Ref<const Eigen::MatrixXd>& m,
                          double tol_factor) {
  require(m.allFinite(), ErrorCode::kNonFinite, "matrix contains NaN or Inf entries");
  SubspaceBasis span;
  if (m.cols() == 0 || m.rows() == 0) {
    span.basis = Eigen::MatrixXd(m.rows(), 0);
    return span;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  if (sigma.size() > 0 && sigma(0) > 0.0) {
    const double threshold =
        tol_factor * static_cast<double>(std::max(m.rows(), m.cols())) * sigma(0);
    while (rank < sigma.size() && sigma(rank) > threshold) ++rank;
  }
  span.basis = svd.matrixU().leftCols(rank);
  return span;
}

Eigen::MatrixXd relevant_disturbances_matrix(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                             const SubspaceBasis& p_c,
                                             double tol_factor) {
  require(a.rows() == a.cols(), ErrorCode::kShapeMismatch, "A must be square");
  require(p_c.ambient_dim() == a.rows(), ErrorCode::kShapeMismatch,
          "basis ambient dimension must match A");
  const double tol = subspace_tolerance(a, tol_factor);
  const double residual = invariance_residual(a, p_c);
  require(residual <= std::sqrt(static_cast<double>(a.rows())) * tol,
          ErrorCode::kInvariantViolation,
          "p_c is not an invariant subspace of A at the working tolerance");

  const Eigen::Index d = a.rows();
  const Eigen::Index r = p_c.dim();
  // QR-complete the basis to a full orthonormal frame [V_c | complement].
  Eigen::MatrixXd frame;
  if (r == 0) {
    frame = Eigen::MatrixXd::Identity(d, d);
  } else {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(p_c.basis);
    frame = qr.householderQ();
  }
  const Eigen::MatrixXd rotated = frame.transpose() * a * frame;
  const Eigen::MatrixXd x12_t = rotated.topRightCorner(r, d - r).transpose();
  const Eigen::MatrixXd x2_t = rotated.bottomRightCorner(d - r, d - r).transpose();

  const Eigen::Index blocks = d - r + 1;
  Eigen::MatrixXd rd(d - r, r * blocks);
  if (r == 0) return rd;
  Eigen::MatrixXd term = x12_t;
  for (Eigen::Index k = 0; k < blocks; ++k) {
    rd.middleCols(k * r, r) = term;
    if (k + 1 < blocks) term = x2_t * term;
  }
  return rd;
}

SubspaceBasis minimal_invariant_subspace(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                         const SubspaceBasis& seed,
                                         double tol_factor) {
  require(a.rows() == a.cols(), ErrorCode::kShapeMismatch, "A must be square");
  require(seed.ambient_dim() == a.rows(), ErrorCode::kShapeMismatch,
          "seed ambient dimension must match A");
  const Eigen::Index d = a.rows();
  const double tol = subspace_tolerance(a, tol_factor);

  std::vector<Eigen::VectorXd> columns;
  columns.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < seed.dim(); ++j) columns.push_back(seed.basis.col(j));

  // Each column is processed exactly once, including appended ones, so the
  // loop terminates after one clean pass over a closed basis.
  for (std::size_t i = 0; i < columns.size(); ++i) {
    Eigen::VectorXd w = a * columns[i];
    for (int sweep = 0; sweep < 2; ++sweep) {  // re-orthogonalized CGS
      for (const Eigen::VectorXd& c : columns) w -= c.dot(w) * c;
    }
    const double norm = w.norm();
    if (norm > tol && columns.size() < static_cast<std::size_t>(d)) {
      columns.push_back(w / norm);
    }
  }

  SubspaceBasis result;
  result.basis = Eigen::MatrixXd(d, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    result.basis.col(static_cast<Eigen::Index>(j)) = columns[j];
  }
  return result;
}

PcPartition pc_decompose(const Eigen::Ref<const Eigen::MatrixXd>& a,
                         const Eigen::Ref<const Eigen::MatrixXd>& b,
                         double tol_factor) {
  require(a.rows() == a.cols(), ErrorCode::kShapeMismatch, "A must be square");
  require(b.rows() == a.rows(), ErrorCode::kShapeMismatch,
          "B must have as many rows as A");
  const Eigen::Index d = a.rows();

  PcPartition part;
  part.p_b = column_span(b, tol_factor);
  part.p_c = minimal_invariant_subspace(a, part.p_b, tol_factor);
  const Eigen::MatrixXd pc = part.p_c.projector();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  part.p_r = minimal_invariant_subspace((eye - pc) * a.transpose(), part.p_c, tol_factor);
  const Eigen::MatrixXd pr = part.p_r.projector();
  const Eigen::MatrixXd reconstruction =
      pc * a * pc + pr * a * (pr - pc) + (eye - pr) * a * (eye - pc);
  part.residual = (a - reconstruction).norm();
  return part;
}

SparsityBlocks block_partition_sparsity(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                        const Eigen::Ref<const Eigen::MatrixXd>& b,
                                        double zero_tol) {
  require(a.rows() == a.cols(), ErrorCode::kShapeMismatch, "A must be square");
  require(b.rows() == a.rows(), ErrorCode::kShapeMismatch,
          "B must have as many rows as A");
  const Eigen::Index d = a.rows();

  // Edge j -> i iff |A(i,j)| > zero_tol (coordinate j influences i).
  const auto has_edge = [&](Eigen::Index from, Eigen::Index to) {
    return std::abs(a(to, from)) > zero_tol;
  };

  std::vector<bool> in_block1(static_cast<std::size_t>(d), false);
  std::vector<Eigen::Index> frontier;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (b.cols() > 0 && b.row(i).cwiseAbs().maxCoeff() > zero_tol) {
      in_block1[static_cast<std::size_t>(i)] = true;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {  // forward closure from supp(B)
    const Eigen::Index j = frontier.back();
    frontier.pop_back();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!in_block1[static_cast<std::size_t>(i)] && has_edge(j, i)) {
        in_block1[static_cast<std::size_t>(i)] = true;
        frontier.push_back(i);
      }
    }
  }

  // Backward closure: coordinates with a directed path into block1.
  std::vector<bool> feeds_block1(static_cast<std::size_t>(d), false);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (in_block1[static_cast<std::size_t>(i)]) {
      feeds_block1[static_cast<std::size_t>(i)] = true;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const Eigen::Index i = frontier.back();
    frontier.pop_back();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!feeds_block1[static_cast<std::size_t>(j)] && has_edge(j, i)) {
        feeds_block1[static_cast<std::size_t>(j)] = true;
        frontier.push_back(j);
      }
    }
  }

  SparsityBlocks blocks;
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto idx = static_cast<int>(i);
    if (in_block1[static_cast<std::size_t>(i)]) {
      blocks.block1.push_back(idx);
    } else if (feeds_block1[static_cast<std::size_t>(i)]) {
      blocks.block2.push_back(idx);
    } else {
      blocks.block3.push_back(idx);
    }
  }
  return blocks;
}

double linf_block_norm(const Eigen::Ref<const Eigen::MatrixXd>& a3) {
  require(a3.rows() == a3.cols(), ErrorCode::kShapeMismatch,
          "L-infinity block norm requires a square matrix");
  if (a3.rows() == 0) return 0.0;
  return a3.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace pclq
