#include "pclq/synth.hpp"

#include <cmath>

#include "pclq/errors.hpp"

namespace pclq {

namespace {

constexpr int kGelfandSquarings = 12;
constexpr double kDegenerateRadius = 1e-12;
constexpr int kResampleAttempts = 5;

// Sub-stream labels; fixed so that regenerating one block never shifts the
// draws of another.
enum Stream : std::uint64_t {
  kStreamA1 = 0,
  kStreamA2 = 1,
  kStreamA3 = 2,
  kStreamA12 = 3,
  kStreamA32 = 4,
  kStreamB1 = 5,
};

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  }
  return m;
}

// Standard normal block rescaled to the target spectral radius.
Eigen::MatrixXd scaled_block(Eigen::Index size, double target_rho, CounterRng& rng) {
  if (size == 0) return Eigen::MatrixXd(0, 0);
  for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
    Eigen::MatrixXd block = gaussian_matrix(size, size, rng);
    const double radius =
        spectral_radius_estimate(block, kGelfandSquarings).radius_estimate;
    if (radius >= kDegenerateRadius) return (target_rho / radius) * block;
  }
  fail(ErrorCode::kDegenerateBlock,
       "sampled block kept a near-zero spectral radius after resampling");
}

}  // namespace

const char* q_mode_name(QMode mode) {
  return mode == QMode::kIOneTwo ? "i_onetwo" : "identity";
}

std::optional<QMode> q_mode_from_name(const std::string& name) {
  if (name == "i_onetwo") return QMode::kIOneTwo;
  if (name == "identity") return QMode::kIdentity;
  return std::nullopt;
}

GeneratedSystem gen_pclq(const PcLqSpec& spec, CounterRng& rng, QMode q_mode) {
  require(spec.s_c >= 0 && spec.s_e >= 0 && spec.d_u >= 1 && spec.d >= 1,
          ErrorCode::kBadArgument, "dimensions must be nonnegative and d, d_u >= 1");
  require(spec.s_c + spec.s_e <= spec.d, ErrorCode::kBadArgument,
          "s_c + s_e must not exceed d");
  require(spec.rho1 >= 0.0 && spec.rho2 >= 0.0 && spec.rho3 >= 0.0,
          ErrorCode::kBadArgument, "target spectral radii must be nonnegative");

  const Eigen::Index sc = spec.s_c;
  const Eigen::Index se = spec.s_e;
  const Eigen::Index d = spec.d;
  const Eigen::Index s = sc + se;
  const Eigen::Index d3 = d - s;

  CounterRng rng_a1 = rng.split(kStreamA1);
  CounterRng rng_a2 = rng.split(kStreamA2);
  CounterRng rng_a3 = rng.split(kStreamA3);
  CounterRng rng_a12 = rng.split(kStreamA12);
  CounterRng rng_a32 = rng.split(kStreamA32);
  CounterRng rng_b1 = rng.split(kStreamB1);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  a.block(0, 0, sc, sc) = scaled_block(sc, spec.rho1, rng_a1);
  a.block(sc, sc, se, se) = scaled_block(se, spec.rho2, rng_a2);
  a.block(s, s, d3, d3) = scaled_block(d3, spec.rho3, rng_a3);
  a.block(0, sc, sc, se) = gaussian_matrix(sc, se, rng_a12);
  a.block(s, sc, d3, se) = gaussian_matrix(d3, se, rng_a32);

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, spec.d_u);
  b.topRows(sc) = gaussian_matrix(sc, spec.d_u, rng_b1);

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, d);
  if (q_mode == QMode::kIdentity) {
    q.setIdentity();
  } else {
    q.diagonal().head(s).setOnes();
  }

  GeneratedSystem gen{
      LqSystem(std::move(a), std::move(b), std::move(q),
               Eigen::MatrixXd::Identity(spec.d_u, spec.d_u)),
      SparsityBlocks{}, 0.0};
  for (Eigen::Index i = 0; i < sc; ++i) gen.blocks.block1.push_back(static_cast<int>(i));
  for (Eigen::Index i = sc; i < s; ++i) gen.blocks.block2.push_back(static_cast<int>(i));
  for (Eigen::Index i = s; i < d; ++i) gen.blocks.block3.push_back(static_cast<int>(i));
  gen.a3_linf = linf_block_norm(gen.system.a.block(s, s, d3, d3));
  return gen;
}

void resample_irrelevant_blocks(GeneratedSystem& gen, const PcLqSpec& spec,
                                CounterRng& rng) {
  const Eigen::Index sc = spec.s_c;
  const Eigen::Index s = sc + spec.s_e;
  const Eigen::Index d3 = spec.d - s;
  require(gen.system.state_dim() == spec.d, ErrorCode::kShapeMismatch,
          "system does not match the spec dimensions");
  CounterRng rng_a3 = rng.split(kStreamA3);
  CounterRng rng_a32 = rng.split(kStreamA32);
  gen.system.a.block(s, s, d3, d3) = scaled_block(d3, spec.rho3, rng_a3);
  gen.system.a.block(s, sc, d3, spec.s_e) =
      gaussian_matrix(d3, spec.s_e, rng_a32);
  gen.a3_linf = linf_block_norm(gen.system.a.block(s, s, d3, d3));
}

LqSystem gen_counterexample(int d, const Eigen::Ref<const Eigen::VectorXd>& rho) {
  require(d >= 2, ErrorCode::kBadArgument, "counterexample needs d >= 2");
  require(rho.size() == d - 1, ErrorCode::kBadArgument,
          "rho must have d - 1 entries");
  require(rho.cwiseAbs().maxCoeff() < 1.0, ErrorCode::kBadArgument,
          "uncontrollable modes must satisfy |rho| < 1");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  a.row(0).setOnes();
  for (int i = 1; i < d; ++i) a(i, i) = rho(i - 1);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, 1);
  b(0, 0) = 1.0;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, d);
  q(0, 0) = 1.0;
  return LqSystem(std::move(a), std::move(b), std::move(q),
                  Eigen::MatrixXd::Identity(1, 1));
}

Dataset sample_transitions(const LqSystem& sys, int n, const NoiseSpec& noise,
                           CounterRng& rng) {
  require(n >= 1, ErrorCode::kBadArgument, "need at least one sample");
  require(noise.sigma0 >= 0.0 && noise.sigma_u >= 0.0 && noise.sigma_xi >= 0.0,
          ErrorCode::kBadArgument, "noise standard deviations must be nonnegative");
  const Eigen::Index d = sys.state_dim();
  const Eigen::Index du = sys.input_dim();

  CounterRng rng_x0 = rng.split(0);
  CounterRng rng_u0 = rng.split(1);
  CounterRng rng_xi = rng.split(2);

  Dataset ds;
  if (noise.x0_covariance) {
    require(noise.x0_covariance->rows() == d && noise.x0_covariance->cols() == d,
            ErrorCode::kShapeMismatch, "x0 covariance must be d x d");
    Eigen::LLT<Eigen::MatrixXd> llt(*noise.x0_covariance);
    require(llt.info() == Eigen::Success, ErrorCode::kBadArgument,
            "x0 covariance must be symmetric positive definite");
    ds.x0 = gaussian_matrix(n, d, rng_x0) * llt.matrixL().transpose();
    ds.sigma0 = 0.0;  // general covariance marker
  } else {
    ds.x0 = noise.sigma0 * gaussian_matrix(n, d, rng_x0);
    ds.sigma0 = noise.sigma0;
  }
  ds.u0 = noise.sigma_u * gaussian_matrix(n, du, rng_u0);
  ds.x1 = ds.x0 * sys.a.transpose() + ds.u0 * sys.b.transpose() +
          noise.sigma_xi * gaussian_matrix(n, d, rng_xi);
  return ds;
}

}  // namespace pclq
