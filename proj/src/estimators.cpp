#include "pclq/estimators.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "pclq/errors.hpp"

namespace pclq {

namespace {

constexpr double kRankTolFactor = 1e-9;       // module-wide pseudo-inverse tolerance
constexpr double kDegenerateResidual = 1e-12;  // relative residual-variance floor

// Moore-Penrose inverse of a symmetric PSD Gram via SVD.
Eigen::MatrixXd pinv_psd(const Eigen::Ref<const Eigen::MatrixXd>& g) {
  if (g.rows() == 0) return Eigen::MatrixXd(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  if (sigma.size() > 0 && sigma(0) > 0.0) {
    const double threshold =
        kRankTolFactor * static_cast<double>(std::max(g.rows(), g.cols())) * sigma(0);
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma(i) > threshold) inv(i) = 1.0 / sigma(i);
    }
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Minimum-norm least-squares solve of features * theta = targets.
Eigen::MatrixXd min_norm_solve(const Eigen::Ref<const Eigen::MatrixXd>& features,
                               const Eigen::Ref<const Eigen::MatrixXd>& targets) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(features,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankTolFactor *
                   static_cast<double>(std::max(features.rows(), features.cols())));
  return svd.solve(targets);
}

Eigen::MatrixXd drop_column(const Eigen::Ref<const Eigen::MatrixXd>& m,
                            Eigen::Index j) {
  Eigen::MatrixXd out(m.rows(), m.cols() - 1);
  out.leftCols(j) = m.leftCols(j);
  out.rightCols(m.cols() - 1 - j) = m.rightCols(m.cols() - 1 - j);
  return out;
}

Eigen::VectorXd drop_entry(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index j) {
  Eigen::VectorXd out(v.size() - 1);
  out.head(j) = v.head(j);
  out.tail(v.size() - 1 - j) = v.tail(v.size() - 1 - j);
  return out;
}

}  // namespace

void validate_dataset(const Dataset& ds) {
  require(ds.x0.rows() >= 1, ErrorCode::kBadArgument, "dataset must have N >= 1 rows");
  require(ds.x1.rows() == ds.x0.rows() && ds.u0.rows() == ds.x0.rows(),
          ErrorCode::kShapeMismatch, "x0, u0, x1 must have equal row counts");
  require(ds.x1.cols() == ds.x0.cols(), ErrorCode::kShapeMismatch,
          "x0 and x1 must have equal column counts");
  require(ds.x0.allFinite() && ds.u0.allFinite() && ds.x1.allFinite(),
          ErrorCode::kNonFinite, "dataset contains NaN or Inf entries");
}

const char* estimator_kind_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kOls: return "ols";
    case EstimatorKind::kSecondMoment: return "moment";
    case EstimatorKind::kSemiparametric: return "semiparam";
  }
  return "unknown";
}

std::optional<EstimatorKind> estimator_kind_from_name(const std::string& name) {
  if (name == "ols") return EstimatorKind::kOls;
  if (name == "moment") return EstimatorKind::kSecondMoment;
  if (name == "semiparam") return EstimatorKind::kSemiparametric;
  return std::nullopt;
}

Eigen::MatrixXd soft_threshold(const Eigen::Ref<const Eigen::MatrixXd>& m, double eps) {
  require(eps >= 0.0, ErrorCode::kBadArgument, "threshold must be nonnegative");
  Eigen::MatrixXd out = m;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double x = out(i, j);
      out(i, j) = std::abs(x) > eps ? x - (x > 0 ? eps : -eps) : 0.0;
    }
  }
  return out;
}

EstimateResult ols_estimate(const Dataset& ds,
                            const std::optional<Eigen::MatrixXd>& known_b) {
  validate_dataset(ds);
  const Eigen::Index d = ds.state_dim();
  const Eigen::Index du = ds.input_dim();
  EstimateResult result;
  result.kind = EstimatorKind::kOls;
  if (known_b) {
    require(known_b->rows() == d && known_b->cols() == du, ErrorCode::kShapeMismatch,
            "known B must be d x d_u");
    const Eigen::MatrixXd targets = ds.x1 - ds.u0 * known_b->transpose();
    result.a_hat = min_norm_solve(ds.x0, targets).transpose();
    result.b_hat = *known_b;
    return result;
  }
  Eigen::MatrixXd features(ds.size(), d + du);
  features.leftCols(d) = ds.x0;
  features.rightCols(du) = ds.u0;
  const Eigen::MatrixXd theta = min_norm_solve(features, ds.x1).transpose();
  result.a_hat = theta.leftCols(d);
  result.b_hat = theta.rightCols(du);
  return result;
}

EstimateResult second_moment_estimate(const Dataset& ds) {
  validate_dataset(ds);
  require(ds.sigma0 > 0.0, ErrorCode::kSigmaZeroUnknown,
          "second-moment estimator needs isotropic x0 with known sigma0");
  const double n = static_cast<double>(ds.size());
  EstimateResult result;
  result.kind = EstimatorKind::kSecondMoment;
  result.a_hat = (ds.x1.transpose() * ds.x0) / (n * ds.sigma0 * ds.sigma0);
  result.b_hat = (ds.x1.transpose() * ds.u0) / n;
  return result;
}

Eigen::MatrixXd estimate_b_second_moment(const Dataset& ds) {
  validate_dataset(ds);
  return (ds.x1.transpose() * ds.u0) / static_cast<double>(ds.size());
}

Eigen::VectorXd solve_semiparametric(const SemiparamProblem& problem) {
  const Eigen::Index n = problem.y.size();
  require(n >= 2, ErrorCode::kBadArgument, "need at least two rows to split");
  require(problem.z1.rows() == n && problem.z2.rows() == n, ErrorCode::kShapeMismatch,
          "y, z1, z2 must have equal row counts");
  require(problem.z1.cols() >= 1, ErrorCode::kBadArgument, "z1 must have d_w >= 1");

  const Eigen::Index n1 = n / 2;  // first half fits L and c, remainder fits w
  const Eigen::Index n2 = n - n1;
  const auto z1a = problem.z1.topRows(n1);
  const auto z2a = problem.z2.topRows(n1);
  const auto ya = problem.y.head(n1);
  const auto z1b = problem.z1.bottomRows(n2);
  const auto z2b = problem.z2.bottomRows(n2);
  const auto yb = problem.y.tail(n2);

  const Eigen::MatrixXd gram2_pinv = pinv_psd(z2a.transpose() * z2a);
  const Eigen::MatrixXd l_hat = (z1a.transpose() * z2a) * gram2_pinv;
  const Eigen::VectorXd c_hat = gram2_pinv * (z2a.transpose() * ya);

  const Eigen::MatrixXd predicted = z2b * l_hat.transpose();
  const Eigen::MatrixXd residual = z1b - predicted;
  const double scale = z1b.norm() + predicted.norm();
  require(residual.norm() > kDegenerateResidual * scale, ErrorCode::kDegenerateResidual,
          "residualized z1 has no empirical variance");

  const Eigen::MatrixXd gram_r = residual.transpose() * residual;
  return pinv_psd(gram_r) * (residual.transpose() * (yb - z2b * c_hat));
}

// ---------------------------------------------------------------------------
// Entrywise reduction with shared per-column Grams.
//
// For fixed column j, both first-stage quantities and the second-half
// residual depend only on j:
//   L_j  = G(j, -j) G(-j,-j)^+            (cross-correlation row)
//   r    = Xb(:, j) - Xb(:, -j) L_j'      (residualized z1, second half)
//   D_j  = r'r
// and the entry estimate for row i collapses to
//   w_ij = (r' Yb(:, i) - (G(-j,-j)^+ Xb(:,-j)' r)' (Xa' Ya)(-j, i)) / D_j.
// ---------------------------------------------------------------------------

struct SemiparamGramCache::Impl {
  Eigen::MatrixXd xa, ya, xb, yb;
  Eigen::MatrixXd gram;      // Xa' Xa, d x d
  Eigen::MatrixXd response;  // Xa' Ya, d x d

  struct Column {
    bool ready = false;
    bool degenerate = false;
    double denom = 0.0;
    Eigen::VectorXd r_dot_yb;  // d: r' Yb(:, i)
    Eigen::VectorXd weights;   // d-1: G(-j,-j)^+ Xb(:,-j)' r
  };
  mutable std::vector<Column> columns;

  explicit Impl(const Dataset& ds) {
    const Eigen::Index n1 = ds.size() / 2;
    const Eigen::Index n2 = ds.size() - n1;
    xa = ds.x0.topRows(n1);
    ya = ds.x1.topRows(n1);
    xb = ds.x0.bottomRows(n2);
    yb = ds.x1.bottomRows(n2);
    gram = xa.transpose() * xa;
    response = xa.transpose() * ya;
    columns.resize(static_cast<std::size_t>(ds.state_dim()));
  }

  const Column& column(Eigen::Index j) const {
    Column& col = columns[static_cast<std::size_t>(j)];
    if (col.ready) return col;
    const Eigen::MatrixXd gram_jj =
        drop_column(drop_column(gram, j).transpose(), j);  // drop row and column j
    const Eigen::MatrixXd gram_pinv = pinv_psd(gram_jj);
    const Eigen::VectorXd cross = drop_entry(gram.row(j).transpose(), j);
    const Eigen::VectorXd l_hat = gram_pinv * cross;  // symmetric pinv

    const Eigen::MatrixXd xb_minus = drop_column(xb, j);
    const Eigen::VectorXd predicted = xb_minus * l_hat;
    const Eigen::VectorXd residual = xb.col(j) - predicted;
    const double scale = xb.col(j).norm() + predicted.norm();
    col.denom = residual.squaredNorm();
    col.degenerate = !(residual.norm() > kDegenerateResidual * scale);
    if (!col.degenerate) {
      col.r_dot_yb = yb.transpose() * residual;
      col.weights = gram_pinv * (xb_minus.transpose() * residual);
    }
    col.ready = true;
    return col;
  }
};

SemiparamGramCache::SemiparamGramCache(const Dataset& ds) {
  validate_dataset(ds);
  require(ds.size() >= 2, ErrorCode::kBadArgument, "need at least two rows to split");
  impl_ = std::make_unique<Impl>(ds);
}

SemiparamGramCache::~SemiparamGramCache() = default;

double SemiparamGramCache::entry(Eigen::Index i, Eigen::Index j) const {
  const Eigen::Index d = impl_->gram.rows();
  require(i >= 0 && i < d && j >= 0 && j < d, ErrorCode::kBadArgument,
          "entry indices out of range");
  const Impl::Column& col = impl_->column(j);
  require(!col.degenerate, ErrorCode::kDegenerateResidual,
          "residualized z1 has no empirical variance");
  const Eigen::VectorXd response_j = drop_entry(impl_->response.col(i), j);
  return (col.r_dot_yb(i) - col.weights.dot(response_j)) / col.denom;
}

double semiparametric_entry(const Dataset& ds, Eigen::Index i, Eigen::Index j,
                            const SemiparamGramCache* cache) {
  if (cache != nullptr) return cache->entry(i, j);
  validate_dataset(ds);
  const Eigen::Index d = ds.state_dim();
  require(i >= 0 && i < d && j >= 0 && j < d, ErrorCode::kBadArgument,
          "entry indices out of range");
  SemiparamProblem problem;
  problem.y = ds.x1.col(i);
  problem.z1 = ds.x0.col(j);
  problem.z2 = drop_column(ds.x0, j);
  return solve_semiparametric(problem)(0);
}

SemiparamEstimate semiparametric_estimate_a(const Dataset& ds) {
  SemiparamGramCache cache(ds);
  const Eigen::Index d = ds.state_dim();
  SemiparamEstimate estimate;
  estimate.a_hat = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      try {
        estimate.a_hat(i, j) = cache.entry(i, j);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateResidual) throw;
        estimate.degenerate_entries += 1;  // entry stays 0
      }
    }
  }
  return estimate;
}

EstimateResult run_estimator(const Dataset& ds, EstimatorKind kind,
                             const std::optional<Eigen::MatrixXd>& known_b) {
  switch (kind) {
    case EstimatorKind::kOls:
      return ols_estimate(ds, known_b);
    case EstimatorKind::kSecondMoment: {
      EstimateResult result = second_moment_estimate(ds);
      if (known_b) result.b_hat = *known_b;
      return result;
    }
    case EstimatorKind::kSemiparametric: {
      SemiparamEstimate a = semiparametric_estimate_a(ds);
      EstimateResult result;
      result.kind = EstimatorKind::kSemiparametric;
      result.a_hat = std::move(a.a_hat);
      result.degenerate_entries = a.degenerate_entries;
      result.b_hat = known_b ? *known_b : estimate_b_second_moment(ds);
      return result;
    }
  }
  fail(ErrorCode::kBadArgument, "unknown estimator kind");
}

ThresholdedModel build_thresholded_model(const Dataset& ds, double eps,
                                         EstimatorKind kind,
                                         const std::optional<Eigen::MatrixXd>& known_b) {
  require(eps >= 0.0, ErrorCode::kBadArgument, "threshold must be nonnegative");
  ThresholdedModel model;
  model.estimate = run_estimator(ds, kind, known_b);
  model.a_bar = soft_threshold(model.estimate.a_hat, eps);
  // A known input matrix is ground truth, not an estimate; it passes
  // through untouched (its zero pattern is already exact).
  model.b_bar = known_b ? *known_b : soft_threshold(model.estimate.b_hat, eps);
  return model;
}

PolicyLearnResult learn_policy(const Dataset& ds, double eps, EstimatorKind kind,
                               double dare_tol, std::int64_t dare_max_iter,
                               const std::optional<Eigen::MatrixXd>& known_b) {
  PolicyLearnResult result;
  result.model = build_thresholded_model(ds, eps, kind, known_b);
  const Eigen::Index d = result.model.a_bar.rows();
  const Eigen::Index du = result.model.b_bar.cols();
  const LqSystem nominal(result.model.a_bar, result.model.b_bar,
                         Eigen::MatrixXd::Identity(d, d),
                         Eigen::MatrixXd::Identity(du, du));
  result.dare = solve_dare_value_iteration(nominal, dare_tol, dare_max_iter);
  return result;
}

}  // namespace pclq
