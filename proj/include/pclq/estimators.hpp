#ifndef PCLQ_ESTIMATORS_HPP_
#define PCLQ_ESTIMATORS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "pclq/lqr.hpp"

namespace pclq {

// N one-step transitions (x0, u0, x1). sigma0 records the per-coordinate
// standard deviation when x0 was sampled isotropically; 0 marks a general
// covariance (which the second-moment estimator must reject).
struct Dataset {
  Eigen::MatrixXd x0;  // N x d
  Eigen::MatrixXd u0;  // N x d_u
  Eigen::MatrixXd x1;  // N x d
  double sigma0 = 0.0;

  Eigen::Index size() const { return x0.rows(); }
  Eigen::Index state_dim() const { return x0.cols(); }
  Eigen::Index input_dim() const { return u0.cols(); }
};

void validate_dataset(const Dataset& ds);

enum class EstimatorKind { kOls, kSecondMoment, kSemiparametric };

// Short tags used by the CLI and the sweep CSV.
const char* estimator_kind_name(EstimatorKind kind);
std::optional<EstimatorKind> estimator_kind_from_name(const std::string& name);

struct EstimateResult {
  Eigen::MatrixXd a_hat;  // d x d
  Eigen::MatrixXd b_hat;  // d x d_u
  EstimatorKind kind = EstimatorKind::kOls;
  // Semiparametric entries zeroed after a degenerate residual (diagnostics).
  int degenerate_entries = 0;
};

// Entrywise shrink toward zero: |x| <= eps maps to exactly 0, otherwise
// x - sign(x) * eps.
Eigen::MatrixXd soft_threshold(const Eigen::Ref<const Eigen::MatrixXd>& m, double eps);

// Minimum-Frobenius-norm least squares of x1 onto [x0 u0]; with known_b the
// input contribution is subtracted first and only A is regressed.
EstimateResult ols_estimate(const Dataset& ds,
                            const std::optional<Eigen::MatrixXd>& known_b = {});

// Plug-in second-moment products: A_hat = (1/(N sigma0^2)) sum x1 x0',
// B_hat = (1/N) sum x1 u0'. Requires isotropic x0 (sigma0 > 0).
EstimateResult second_moment_estimate(const Dataset& ds);

// B-side of the second-moment estimator alone (valid whenever u0 has unit
// covariance, regardless of the x0 design).
Eigen::MatrixXd estimate_b_second_moment(const Dataset& ds);

// Generic two-stage orthogonalized regression y ~ <w, z1> + <nuisance, z2>:
// the first half of the rows fits the cross-correlation map and the
// conditional response, the second half regresses the decorrelated residual.
struct SemiparamProblem {
  Eigen::VectorXd y;   // N
  Eigen::MatrixXd z1;  // N x d_w  (coefficients of interest)
  Eigen::MatrixXd z2;  // N x d_e  (nuisance features)
};

Eigen::VectorXd solve_semiparametric(const SemiparamProblem& problem);

// Per-column-j scratch for the entrywise reduction: the nuisance Gram and
// residual data depend only on j, so one factorization serves all d rows.
class SemiparamGramCache {
 public:
  explicit SemiparamGramCache(const Dataset& ds);
  ~SemiparamGramCache();
  SemiparamGramCache(const SemiparamGramCache&) = delete;
  SemiparamGramCache& operator=(const SemiparamGramCache&) = delete;

  // Entry estimate for (i, j); throws DegenerateResidual like the
  // standalone path.
  double entry(Eigen::Index i, Eigen::Index j) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Single-entry estimate of A(i, j) by reducing to the scalar semiparametric
// problem y = x1(i), z1 = x0(j), z2 = x0 without column j.
double semiparametric_entry(const Dataset& ds, Eigen::Index i, Eigen::Index j,
                            const SemiparamGramCache* cache = nullptr);

struct SemiparamEstimate {
  Eigen::MatrixXd a_hat;
  int degenerate_entries = 0;  // entries recorded as 0 after a degenerate residual
};

// Full d x d sweep of semiparametric_entry with shared per-column Grams.
SemiparamEstimate semiparametric_estimate_a(const Dataset& ds);

// Dispatches to the chosen estimator; known_b replaces the B estimate (the
// protocol where the input matrix is available exactly).
EstimateResult run_estimator(const Dataset& ds, EstimatorKind kind,
                             const std::optional<Eigen::MatrixXd>& known_b = {});

struct ThresholdedModel {
  EstimateResult estimate;  // raw estimator output
  Eigen::MatrixXd a_bar;    // soft-thresholded dynamics
  Eigen::MatrixXd b_bar;    // soft-thresholded inputs (known B passes through)
};

ThresholdedModel build_thresholded_model(const Dataset& ds, double eps,
                                         EstimatorKind kind,
                                         const std::optional<Eigen::MatrixXd>& known_b = {});

struct PolicyLearnResult {
  ThresholdedModel model;
  RiccatiSolution dare;  // solution for (a_bar, b_bar, I, I)
};

// End-to-end learner: estimate, soft-threshold, then synthesize the
// certainty-equivalent gain by solving the DARE with unit costs. DARE
// failures propagate (callers treat them as trial failures).
PolicyLearnResult learn_policy(const Dataset& ds, double eps, EstimatorKind kind,
                               double dare_tol = 1e-10,
                               std::int64_t dare_max_iter = 100000,
                               const std::optional<Eigen::MatrixXd>& known_b = {});

}  // namespace pclq

#endif  // PCLQ_ESTIMATORS_HPP_
