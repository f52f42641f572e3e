#ifndef PCLQ_SYNTH_HPP_
#define PCLQ_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "pclq/estimators.hpp"
#include "pclq/lqr.hpp"
#include "pclq/rng.hpp"
#include "pclq/structure.hpp"

namespace pclq {

// Parameters of a synthetic three-block system: controllable block of size
// s_c, relevant uncontrollable block of size s_e, irrelevant remainder, and
// target spectral radii for the three diagonal blocks.
struct PcLqSpec {
  int s_c = 5;
  int s_e = 5;
  int d = 20;
  int d_u = 1;
  double rho1 = 1.0;
  double rho2 = 0.9;
  double rho3 = 0.9;
  std::uint64_t seed = 0;
};

enum class QMode { kIOneTwo, kIdentity };

const char* q_mode_name(QMode mode);
std::optional<QMode> q_mode_from_name(const std::string& name);

struct NoiseSpec {
  double sigma0 = 1.0;    // x0 std per coordinate (isotropic)
  double sigma_u = 1.0;   // u0 std
  double sigma_xi = 1.0;  // process noise std
  // When set, x0 rows are drawn with this covariance (must be symmetric PD,
  // checked via Cholesky) and the dataset's sigma0 marker becomes 0.
  std::optional<Eigen::MatrixXd> x0_covariance;
};

struct GeneratedSystem {
  LqSystem system;
  SparsityBlocks blocks;
  double a3_linf = 0.0;  // reported, not enforced: the L_inf stability margin
};

// Draws the blocks with i.i.d. standard normal entries, rescales each
// diagonal block to its target spectral radius (Gelfand normalizer with 12
// squarings), and leaves the structural zero blocks exactly zero. Q is
// I_{1:2} (ones on blocks 1-2) or the identity.
GeneratedSystem gen_pclq(const PcLqSpec& spec, CounterRng& rng,
                         QMode q_mode = QMode::kIOneTwo);

// Redraws the irrelevant blocks (A_32 and A_3, with the same rho3
// normalization) in place; everything the optimal gain depends on is kept.
void resample_irrelevant_blocks(GeneratedSystem& gen, const PcLqSpec& spec,
                                CounterRng& rng);

// The single-controllable-coordinate family: first row all ones,
// diag(1, rho_1, ..., rho_{d-1}) elsewhere, B = e_1, Q = diag(1, 0, ..., 0),
// R = 1. Requires max |rho_i| < 1.
LqSystem gen_counterexample(int d, const Eigen::Ref<const Eigen::VectorXd>& rho);

// n one-step transitions x1 = A x0 + B u0 + xi with Gaussian draws from the
// counter-based stream.
Dataset sample_transitions(const LqSystem& sys, int n, const NoiseSpec& noise,
                           CounterRng& rng);

}  // namespace pclq

#endif  // PCLQ_SYNTH_HPP_
