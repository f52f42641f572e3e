#ifndef PCLQ_LQR_HPP_
#define PCLQ_LQR_HPP_

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace pclq {

// Discrete-time LQ problem (A, B, Q, R). Construction validates shapes,
// finiteness, and symmetry of the cost matrices; Q may be PSD (including
// rank-deficient), R must at least be symmetric -- definiteness is only
// detected where it matters, inside the Riccati inner solve.
struct LqSystem {
  Eigen::MatrixXd a;  // d x d state dynamics
  Eigen::MatrixXd b;  // d x d_u input matrix
  Eigen::MatrixXd q;  // d x d state cost, symmetric PSD
  Eigen::MatrixXd r;  // d_u x d_u input cost, symmetric PD

  LqSystem(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in, Eigen::MatrixXd q_in,
           Eigen::MatrixXd r_in);

  Eigen::Index state_dim() const { return a.rows(); }
  Eigen::Index input_dim() const { return b.cols(); }
};

struct StabilityReport {
  bool is_stable = false;
  // Gelfand estimate ||M^(2^j)||_F^(1/2^j) at the final squaring.
  double radius_estimate = 0.0;
  // Smallest power 2^j with ||M^(2^j)||_F < 1, when one exists.
  std::optional<std::uint64_t> certified_power;
};

struct RiccatiSolution {
  Eigen::MatrixXd p;  // symmetric PSD value matrix
  Eigen::MatrixXd k;  // gain for u = K x; closed loop is A + B K
  std::int64_t iterations = 0;
  double residual = 0.0;  // ||Riccati(P) - P||_F / (1 + ||P||_F)
};

// Spectral radius estimate by repeated squaring with per-step rescaling.
// Stability is certified (soundly) when some rescaled power has Frobenius
// norm below one; no eigendecomposition is involved.
StabilityReport spectral_radius_estimate(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                         int max_squarings = 14);

inline bool is_stable(const Eigen::Ref<const Eigen::MatrixXd>& m,
                      int max_squarings = 14) {
  return spectral_radius_estimate(m, max_squarings).is_stable;
}

// One application of the Riccati map A'PA + Q - (B'PA)'(R + B'PB)^{-1} B'PA.
Eigen::MatrixXd riccati_map(const LqSystem& sys,
                            const Eigen::Ref<const Eigen::MatrixXd>& p);

// Certainty-equivalent gain K = -(R + B'PB)^{-1} B'PA for a value matrix P.
Eigen::MatrixXd dare_gain(const LqSystem& sys,
                          const Eigen::Ref<const Eigen::MatrixXd>& p);

// Value iteration P_{k+1} = Riccati(P_k) from P_0 = Q until the relative
// Frobenius change drops below tol. Divergence and iteration exhaustion both
// raise MaxIterExceeded (the usual symptom of a non-stabilizable model).
RiccatiSolution solve_dare_value_iteration(const LqSystem& sys, double tol = 1e-10,
                                           std::int64_t max_iter = 100000);

// Lyapunov policy evaluation: P_K = sum_t ((A+BK)')^t (Q + K'RK) (A+BK)^t,
// accumulated with doubling so marginally slow closed loops still converge
// in O(log) matrix products.
Eigen::MatrixXd policy_value(const LqSystem& sys,
                             const Eigen::Ref<const Eigen::MatrixXd>& k,
                             double tol = 1e-12, std::int64_t max_iter = 64);

// Howard iteration from a stabilizing initial gain; agrees with value
// iteration at the fixed point.
RiccatiSolution policy_iteration(const LqSystem& sys,
                                 const Eigen::Ref<const Eigen::MatrixXd>& k0,
                                 double tol = 1e-10, std::int64_t max_iter = 500);

// Steady-state average cost trace(P W) under process noise covariance W.
double average_cost(const Eigen::Ref<const Eigen::MatrixXd>& p,
                    const Eigen::Ref<const Eigen::MatrixXd>& w);

Eigen::MatrixXd closed_loop(const LqSystem& sys,
                            const Eigen::Ref<const Eigen::MatrixXd>& k);

}  // namespace pclq

#endif  // PCLQ_LQR_HPP_
