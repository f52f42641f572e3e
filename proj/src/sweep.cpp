#include "pclq/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "pclq/errors.hpp"

namespace pclq {

namespace {

// Trial-level solver budget: tight enough that hopeless (near-marginal or
// unstable) estimated models fail fast instead of burning the sweep budget.
constexpr double kTrialDareTol = 1e-10;
constexpr std::int64_t kTrialDareMaxIter = 5000;
constexpr double kPolicyValueTol = 1e-12;

std::string format_compact(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(trials >= 1, ErrorCode::kBadArgument, "trials must be >= 1");
  require(success_factor >= 1.0, ErrorCode::kBadArgument, "success_factor must be >= 1");
  require(eps >= 0.0, ErrorCode::kBadArgument, "eps must be nonnegative");
  require(!d_list.empty() && !n_grid.empty() && !estimators.empty(),
          ErrorCode::kBadArgument, "d_list, n_grid, estimators must be nonempty");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    require(n_grid[i] > n_grid[i - 1], ErrorCode::kBadArgument,
            "n_grid must be strictly increasing");
  }
  for (int d : d_list) {
    require(s_c + s_e <= d, ErrorCode::kBadArgument, "every d must satisfy s_c + s_e <= d");
  }
  require(threads >= 1, ErrorCode::kBadArgument, "threads must be >= 1");
}

TrialResult run_trial(const ExperimentConfig& cfg, EstimatorKind estimator, int d,
                      int n, int trial_index) {
  TrialResult result;
  result.estimator = estimator;
  result.d = d;
  result.n = n;
  result.trial_index = trial_index;
  result.cost_ratio = std::numeric_limits<double>::infinity();

  CounterRng rng = CounterRng(cfg.base_seed)
                       .split(static_cast<std::uint64_t>(d))
                       .split(static_cast<std::uint64_t>(n))
                       .split(static_cast<std::uint64_t>(estimator))
                       .split(static_cast<std::uint64_t>(trial_index));

  PcLqSpec spec;
  spec.s_c = cfg.s_c;
  spec.s_e = cfg.s_e;
  spec.d = d;
  spec.d_u = cfg.d_u;
  spec.rho1 = cfg.rho1;
  spec.rho2 = cfg.rho2;
  spec.rho3 = cfg.rho3;
  spec.seed = cfg.base_seed;

  try {
    CounterRng rng_system = rng.split(0);
    CounterRng rng_data = rng.split(1);
    const GeneratedSystem gen = gen_pclq(spec, rng_system, cfg.q_mode);
    const Dataset ds = sample_transitions(gen.system, n, NoiseSpec{}, rng_data);

    std::optional<Eigen::MatrixXd> known_b;
    if (cfg.known_b) known_b = gen.system.b;
    // The OLS baseline is plain certainty equivalence on the raw min-norm
    // estimate; only the sparse estimators are soft-thresholded.
    const double eps = estimator == EstimatorKind::kOls ? 0.0 : cfg.eps;
    const ThresholdedModel model = build_thresholded_model(ds, eps, estimator, known_b);

    for (Eigen::Index j = 0; j < gen.system.a.cols(); ++j) {
      for (Eigen::Index i = 0; i < gen.system.a.rows(); ++i) {
        if (gen.system.a(i, j) == 0.0 && model.a_bar(i, j) != 0.0) {
          result.false_positive_zeros += 1;
        }
      }
    }

    const Eigen::Index du = model.b_bar.cols();
    const LqSystem nominal(model.a_bar, model.b_bar,
                           Eigen::MatrixXd::Identity(d, d),
                           Eigen::MatrixXd::Identity(du, du));
    const RiccatiSolution learned =
        solve_dare_value_iteration(nominal, kTrialDareTol, kTrialDareMaxIter);
    result.dare_converged = true;

    const Eigen::MatrixXd loop = closed_loop(gen.system, learned.k);
    if (!is_stable(loop)) return result;

    const RiccatiSolution optimal =
        solve_dare_value_iteration(gen.system, kTrialDareTol, kTrialDareMaxIter);
    const Eigen::MatrixXd value =
        policy_value(gen.system, learned.k, kPolicyValueTol);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(d, d);
    result.cost_ratio = average_cost(value, w) / average_cost(optimal.p, w);
    result.stabilized = true;
  } catch (const Error&) {
    // Estimator or solver failure counts as an unsuccessful trial.
    result.stabilized = false;
    result.cost_ratio = std::numeric_limits<double>::infinity();
  }
  return result;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();

  struct Cell {
    EstimatorKind estimator;
    int d;
    int n;
  };
  std::vector<Cell> cells;
  for (EstimatorKind estimator : cfg.estimators) {
    for (int d : cfg.d_list) {
      for (int n : cfg.n_grid) cells.push_back(Cell{estimator, d, n});
    }
  }

  const std::size_t total = cells.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<TrialResult> results(total);
  std::atomic<std::size_t> next_task{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= total) break;
      const Cell& cell = cells[task / static_cast<std::size_t>(cfg.trials)];
      const int trial = static_cast<int>(task % static_cast<std::size_t>(cfg.trials));
      results[task] = run_trial(cfg, cell.estimator, cell.d, cell.n, trial);
    }
  };

  if (cfg.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(cfg.threads));
    for (int t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Aggregate in task order; results are keyed by index, so the rows do not
  // depend on which worker ran which trial.
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepRow row;
    row.estimator = cells[c].estimator;
    row.d = cells[c].d;
    row.n = cells[c].n;
    row.trials = cfg.trials;
    row.base_seed = cfg.base_seed;
    double ratio_sum = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
      const TrialResult& trial =
          results[c * static_cast<std::size_t>(cfg.trials) + static_cast<std::size_t>(t)];
      const bool success =
          trial.stabilized && trial.cost_ratio <= cfg.success_factor;
      if (success) {
        row.successes += 1;
        ratio_sum += trial.cost_ratio;
      }
    }
    row.success_rate = static_cast<double>(row.successes) / cfg.trials;
    row.success_stddev =
        std::sqrt(row.success_rate * (1.0 - row.success_rate) / cfg.trials);
    row.mean_cost_ratio = row.successes > 0
                              ? ratio_sum / row.successes
                              : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIoFailure,
          "cannot open " + path.string() + " for writing");
  out << "estimator,d,n,trials,successes,success_rate,success_stddev,"
         "mean_cost_ratio,base_seed\n";
  for (const SweepRow& row : rows) {
    out << estimator_kind_name(row.estimator) << "," << row.d << "," << row.n << ","
        << row.trials << "," << row.successes << "," << format_compact(row.success_rate)
        << "," << format_compact(row.success_stddev) << ","
        << format_compact(row.mean_cost_ratio) << "," << row.base_seed << "\n";
  }
  out.flush();
  require(out.good(), ErrorCode::kIoFailure, "write failed for " + path.string());
}

ExperimentConfig config_from_doc(const TextDoc& doc) {
  require(doc.kind() == "config", ErrorCode::kIoFailure, "not an experiment config");
  ExperimentConfig cfg;
  if (doc.has_list("d_list")) cfg.d_list = doc.list_ints("d_list");
  if (doc.has_list("n_grid")) cfg.n_grid = doc.list_ints("n_grid");
  if (doc.has_scalar("trials")) cfg.trials = static_cast<int>(doc.scalar_int("trials"));
  if (doc.has_scalar("eps")) cfg.eps = doc.scalar_double("eps");
  if (doc.has_list("estimators")) {
    cfg.estimators.clear();
    for (const std::string& name : doc.list("estimators")) {
      const auto kind = estimator_kind_from_name(name);
      require(kind.has_value(), ErrorCode::kIoFailure,
              "unknown estimator tag '" + name + "' in config");
      cfg.estimators.push_back(*kind);
    }
  }
  if (doc.has_scalar("s_c")) cfg.s_c = static_cast<int>(doc.scalar_int("s_c"));
  if (doc.has_scalar("s_e")) cfg.s_e = static_cast<int>(doc.scalar_int("s_e"));
  if (doc.has_scalar("d_u")) cfg.d_u = static_cast<int>(doc.scalar_int("d_u"));
  if (doc.has_scalar("rho1")) cfg.rho1 = doc.scalar_double("rho1");
  if (doc.has_scalar("rho2")) cfg.rho2 = doc.scalar_double("rho2");
  if (doc.has_scalar("rho3")) cfg.rho3 = doc.scalar_double("rho3");
  if (doc.has_scalar("success_factor")) cfg.success_factor = doc.scalar_double("success_factor");
  if (doc.has_scalar("known_b")) cfg.known_b = doc.scalar_int("known_b") != 0;
  if (doc.has_scalar("base_seed")) cfg.base_seed = doc.scalar_uint("base_seed");
  if (doc.has_scalar("q_mode")) {
    const auto mode = q_mode_from_name(doc.scalar("q_mode"));
    require(mode.has_value(), ErrorCode::kIoFailure, "unknown q_mode in config");
    cfg.q_mode = *mode;
  }
  if (doc.has_scalar("threads")) cfg.threads = static_cast<int>(doc.scalar_int("threads"));
  cfg.validate();
  return cfg;
}

}  // namespace pclq
