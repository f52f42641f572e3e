#ifndef PCLQ_SWEEP_HPP_
#define PCLQ_SWEEP_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pclq/estimators.hpp"
#include "pclq/synth.hpp"
#include "pclq/textio.hpp"

namespace pclq {

// Monte-Carlo sweep over estimators x d x N. Matches the synthetic protocol:
// marginally stable controllable block, stable uncontrollable blocks, unit
// Gaussian draws everywhere, and a trial succeeds when the learned gain both
// certifies stable on the true system and lands within success_factor of the
// optimal average cost.
struct ExperimentConfig {
  std::vector<int> d_list{20, 50};
  std::vector<int> n_grid{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  int trials = 50;
  double eps = 0.1;  // soft threshold for the sparse estimators (OLS baseline is raw)
  std::vector<EstimatorKind> estimators{EstimatorKind::kOls,
                                        EstimatorKind::kSemiparametric};
  int s_c = 5;
  int s_e = 5;
  int d_u = 1;
  double rho1 = 1.0;
  double rho2 = 0.9;
  double rho3 = 0.9;
  double success_factor = 1.1;
  bool known_b = true;
  std::uint64_t base_seed = 0;
  QMode q_mode = QMode::kIOneTwo;
  int threads = 1;

  void validate() const;
};

struct TrialResult {
  EstimatorKind estimator = EstimatorKind::kOls;
  int d = 0;
  int n = 0;
  int trial_index = 0;
  bool stabilized = false;     // closed loop certified stable on the true system
  double cost_ratio = 0.0;     // trace(P_Kbar) / trace(P_star), +inf if unstable
  bool dare_converged = false;
  int false_positive_zeros = 0;  // true zeros of A that are nonzero in A_bar
};

struct SweepRow {
  EstimatorKind estimator = EstimatorKind::kOls;
  int d = 0;
  int n = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double success_stddev = 0.0;  // sqrt(p (1-p) / trials)
  double mean_cost_ratio = 0.0;  // over successful trials; NaN when none
  std::uint64_t base_seed = 0;
};

// One independent trial; the stream is derived from
// (base_seed, d, n, estimator, trial_index) so scheduling order is
// irrelevant. Estimator or solver failures are recorded, never thrown.
TrialResult run_trial(const ExperimentConfig& cfg, EstimatorKind estimator, int d,
                      int n, int trial_index);

// Full cross product; trials run on cfg.threads workers and are aggregated
// in a fixed order, so the output is identical at any parallelism level.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

// CSV with a fixed header, 6-significant-digit floats, and LF line endings.
void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

// Config-file bridge (same text container as system files).
ExperimentConfig config_from_doc(const TextDoc& doc);

}  // namespace pclq

#endif  // PCLQ_SWEEP_HPP_
