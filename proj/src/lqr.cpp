#include "pclq/lqr.hpp"

#include <cmath>
#include <string>

#include "pclq/errors.hpp"

namespace pclq {

namespace {

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* name) {
  require(m.allFinite(), ErrorCode::kNonFinite,
          std::string(name) + " contains NaN or Inf entries");
}

void require_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* name,
                       double rel_tol) {
  const double scale = 1.0 + m.norm();
  require((m - m.transpose()).norm() <= rel_tol * scale, ErrorCode::kBadArgument,
          std::string(name) + " is not symmetric");
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Guard against runaway value iteration on non-stabilizable models.
constexpr double kDivergenceNorm = 1e100;

}  // namespace

LqSystem::LqSystem(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in, Eigen::MatrixXd q_in,
                   Eigen::MatrixXd r_in)
    : a(std::move(a_in)), b(std::move(b_in)), q(std::move(q_in)), r(std::move(r_in)) {
  require(a.rows() == a.cols(), ErrorCode::kShapeMismatch, "A must be square");
  require(b.rows() == a.rows(), ErrorCode::kShapeMismatch,
          "B must have as many rows as A");
  require(q.rows() == a.rows() && q.cols() == a.cols(), ErrorCode::kShapeMismatch,
          "Q must match the shape of A");
  require(r.rows() == b.cols() && r.cols() == b.cols(), ErrorCode::kShapeMismatch,
          "R must be square with size equal to the input dimension");
  require_finite(a, "A");
  require_finite(b, "B");
  require_finite(q, "Q");
  require_finite(r, "R");
  require_symmetric(q, "Q", 1e-12);
  require_symmetric(r, "R", 1e-12);
}

StabilityReport spectral_radius_estimate(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                         int max_squarings) {
  require(m.rows() == m.cols(), ErrorCode::kShapeMismatch,
          "spectral radius estimate requires a square matrix");
  require(max_squarings >= 1, ErrorCode::kBadArgument, "max_squarings must be >= 1");
  require_finite(m, "M");

  StabilityReport report;
  if (m.rows() == 0) {
    report.is_stable = true;
    report.radius_estimate = 0.0;
    report.certified_power = 1;
    return report;
  }

  Eigen::MatrixXd power = m;
  double norm = power.norm();
  if (norm == 0.0) {
    report.is_stable = true;
    report.radius_estimate = 0.0;
    report.certified_power = 1;
    return report;
  }
  // log ||M^(2^j)||_F, tracked in log scale; `power` stays rescaled to unit
  // Frobenius norm so repeated squaring cannot overflow.
  double log_norm = std::log(norm);
  if (log_norm < 0.0) {
    report.is_stable = true;
    report.certified_power = 1;
  }
  power /= norm;
  report.radius_estimate = norm;

  for (int j = 1; j <= max_squarings; ++j) {
    power = (power * power).eval();
    const double step_norm = power.norm();
    if (step_norm == 0.0) {  // nilpotent: the true power vanished
      report.radius_estimate = 0.0;
      report.is_stable = true;
      if (!report.certified_power) report.certified_power = std::uint64_t{1} << j;
      return report;
    }
    log_norm = 2.0 * log_norm + std::log(step_norm);
    power /= step_norm;
    if (log_norm < 0.0 && !report.certified_power) {
      report.is_stable = true;
      report.certified_power = std::uint64_t{1} << j;
    }
    report.radius_estimate = std::exp(log_norm / static_cast<double>(std::uint64_t{1} << j));
  }
  return report;
}

Eigen::MatrixXd riccati_map(const LqSystem& sys,
                            const Eigen::Ref<const Eigen::MatrixXd>& p) {
  const Eigen::MatrixXd gram = sys.r + sys.b.transpose() * p * sys.b;
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(gram));
  require(llt.info() == Eigen::Success, ErrorCode::kSingularInnerSolve,
          "R + B'PB is not positive definite");
  const Eigen::MatrixXd cross = sys.b.transpose() * p * sys.a;  // B'PA
  return symmetrized(sys.a.transpose() * p * sys.a + sys.q -
                     cross.transpose() * llt.solve(cross));
}

Eigen::MatrixXd dare_gain(const LqSystem& sys,
                          const Eigen::Ref<const Eigen::MatrixXd>& p) {
  const Eigen::MatrixXd gram = sys.r + sys.b.transpose() * p * sys.b;
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(gram));
  require(llt.info() == Eigen::Success, ErrorCode::kSingularInnerSolve,
          "R + B'PB is not positive definite");
  return -llt.solve(sys.b.transpose() * p * sys.a);
}

RiccatiSolution solve_dare_value_iteration(const LqSystem& sys, double tol,
                                           std::int64_t max_iter) {
  require(tol > 0.0, ErrorCode::kBadArgument, "tol must be positive");
  require(max_iter >= 1, ErrorCode::kBadArgument, "max_iter must be >= 1");

  Eigen::MatrixXd p = symmetrized(sys.q);
  for (std::int64_t it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd next = riccati_map(sys, p);
    const double change = (next - p).norm() / (1.0 + p.norm());
    p = next;
    require(p.allFinite() && p.norm() < kDivergenceNorm, ErrorCode::kMaxIterExceeded,
            "value iteration diverged; system is likely not stabilizable");
    if (change < tol) {
      RiccatiSolution sol;
      sol.p = p;
      sol.k = dare_gain(sys, p);
      sol.iterations = it;
      sol.residual = (riccati_map(sys, p) - p).norm() / (1.0 + p.norm());
      return sol;
    }
  }
  fail(ErrorCode::kMaxIterExceeded,
       "value iteration did not reach tolerance " + std::to_string(tol) + " in " +
           std::to_string(max_iter) + " iterations");
}

Eigen::MatrixXd policy_value(const LqSystem& sys,
                             const Eigen::Ref<const Eigen::MatrixXd>& k,
                             double tol, std::int64_t max_iter) {
  require(k.rows() == sys.input_dim() && k.cols() == sys.state_dim(),
          ErrorCode::kShapeMismatch, "gain must be d_u x d");
  Eigen::MatrixXd loop = closed_loop(sys, k);
  require(is_stable(loop), ErrorCode::kUnstablePolicy,
          "closed loop fails the stability certificate");

  Eigen::MatrixXd value = symmetrized(sys.q + k.transpose() * sys.r * k);
  Eigen::MatrixXd power = loop;  // (A + BK)^(2^i)
  for (std::int64_t i = 0; i < max_iter; ++i) {
    const Eigen::MatrixXd increment = power.transpose() * value * power;
    value = symmetrized(value + increment);
    require(value.allFinite(), ErrorCode::kUnstablePolicy,
            "Lyapunov sum diverged");
    if (increment.norm() < tol) return value;
    power = (power * power).eval();
  }
  fail(ErrorCode::kUnstablePolicy, "Lyapunov sum did not settle within the doubling budget");
}

RiccatiSolution policy_iteration(const LqSystem& sys,
                                 const Eigen::Ref<const Eigen::MatrixXd>& k0,
                                 double tol, std::int64_t max_iter) {
  require(tol > 0.0, ErrorCode::kBadArgument, "tol must be positive");
  require(k0.rows() == sys.input_dim() && k0.cols() == sys.state_dim(),
          ErrorCode::kShapeMismatch, "initial gain must be d_u x d");
  require(is_stable(closed_loop(sys, k0)), ErrorCode::kUnstableInitialPolicy,
          "initial policy does not stabilize the system");

  Eigen::MatrixXd p = policy_value(sys, k0, tol * 1e-2);
  Eigen::MatrixXd k = k0;
  for (std::int64_t it = 1; it <= max_iter; ++it) {
    k = dare_gain(sys, p);
    const Eigen::MatrixXd next = policy_value(sys, k, tol * 1e-2);
    const double change = (next - p).norm() / (1.0 + p.norm());
    p = next;
    if (change < tol) {
      RiccatiSolution sol;
      sol.p = p;
      sol.k = k;
      sol.iterations = it;
      sol.residual = (riccati_map(sys, p) - p).norm() / (1.0 + p.norm());
      return sol;
    }
  }
  fail(ErrorCode::kMaxIterExceeded, "policy iteration did not converge");
}

double average_cost(const Eigen::Ref<const Eigen::MatrixXd>& p,
                    const Eigen::Ref<const Eigen::MatrixXd>& w) {
  require(p.rows() == p.cols() && w.rows() == w.cols() && p.rows() == w.rows(),
          ErrorCode::kShapeMismatch, "P and W must be square with matching shapes");
  return p.cwiseProduct(w.transpose()).sum();  // trace(P W)
}

Eigen::MatrixXd closed_loop(const LqSystem& sys,
                            const Eigen::Ref<const Eigen::MatrixXd>& k) {
  require(k.rows() == sys.input_dim() && k.cols() == sys.state_dim(),
          ErrorCode::kShapeMismatch, "gain must be d_u x d");
  return sys.a + sys.b * k;
}

}  // namespace pclq
