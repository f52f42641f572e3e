// Command-line front end: system/dataset generation, estimation, DARE
// solving, structure reports, and the Monte-Carlo sweep with CSV output.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "pclq/errors.hpp"
#include "pclq/estimators.hpp"
#include "pclq/lqr.hpp"
#include "pclq/structure.hpp"
#include "pclq/sweep.hpp"
#include "pclq/synth.hpp"
#include "pclq/textio.hpp"

namespace {

void print_matrix(const std::string& name, const Eigen::MatrixXd& m) {
  std::cout << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) std::cout << " ";
      std::cout << pclq::format_full(m(i, j));
    }
    std::cout << "\n";
  }
}

pclq::EstimatorKind parse_kind(const std::string& name) {
  const auto kind = pclq::estimator_kind_from_name(name);
  pclq::require(kind.has_value(), pclq::ErrorCode::kBadArgument,
                "unknown estimator kind '" + name + "' (use ols|moment|semiparam)");
  return *kind;
}

struct GenOptions {
  std::string out;
  std::uint64_t seed = 0;
  int s_c = 5, s_e = 5, d = 20, d_u = 1;
  double rho1 = 1.0, rho2 = 0.9, rho3 = 0.9;
  std::string q_mode = "i_onetwo";
  bool counterexample = false;
  std::vector<double> rho;
};

int run_gen(const GenOptions& opt) {
  if (opt.counterexample) {
    pclq::require(!opt.rho.empty(), pclq::ErrorCode::kBadArgument,
                  "--counterexample needs --rho values");
    Eigen::VectorXd rho(static_cast<Eigen::Index>(opt.rho.size()));
    for (std::size_t i = 0; i < opt.rho.size(); ++i) {
      rho(static_cast<Eigen::Index>(i)) = opt.rho[i];
    }
    const pclq::LqSystem sys =
        pclq::gen_counterexample(static_cast<int>(opt.rho.size()) + 1, rho);
    const pclq::SparsityBlocks blocks = pclq::block_partition_sparsity(sys.a, sys.b);
    pclq::write_system_file(opt.out, sys, blocks);
    std::cout << "wrote counterexample system (d=" << sys.state_dim() << ") to "
              << opt.out << "\n";
    return 0;
  }
  const auto q_mode = pclq::q_mode_from_name(opt.q_mode);
  pclq::require(q_mode.has_value(), pclq::ErrorCode::kBadArgument,
                "unknown q_mode (use i_onetwo|identity)");
  pclq::PcLqSpec spec;
  spec.s_c = opt.s_c;
  spec.s_e = opt.s_e;
  spec.d = opt.d;
  spec.d_u = opt.d_u;
  spec.rho1 = opt.rho1;
  spec.rho2 = opt.rho2;
  spec.rho3 = opt.rho3;
  spec.seed = opt.seed;
  pclq::CounterRng rng(spec.seed);
  const pclq::GeneratedSystem gen = pclq::gen_pclq(spec, rng, *q_mode);
  pclq::write_system_file(opt.out, gen.system, gen.blocks);
  std::cout << "wrote PC-LQ system (d=" << spec.d << ", s_c=" << spec.s_c
            << ", s_e=" << spec.s_e << ", a3_linf=" << gen.a3_linf << ") to "
            << opt.out << "\n";
  if (gen.a3_linf >= 1.0) {
    std::cout << "note: block-3 L_inf norm " << gen.a3_linf
              << " >= 1 (spectral normalization does not bound it)\n";
  }
  return 0;
}

struct SampleOptions {
  std::string system, out;
  int n = 100;
  double sigma0 = 1.0, sigma_u = 1.0, sigma_xi = 1.0;
  std::uint64_t seed = 0;
};

int run_sample(const SampleOptions& opt) {
  const pclq::LoadedSystem loaded = pclq::read_system_file(opt.system);
  pclq::NoiseSpec noise;
  noise.sigma0 = opt.sigma0;
  noise.sigma_u = opt.sigma_u;
  noise.sigma_xi = opt.sigma_xi;
  pclq::CounterRng rng(opt.seed);
  const pclq::Dataset ds = pclq::sample_transitions(loaded.system, opt.n, noise, rng);
  pclq::write_dataset_file(opt.out, ds);
  std::cout << "wrote " << opt.n << " transitions to " << opt.out << "\n";
  return 0;
}

struct EstimateOptions {
  std::string data, out, kind = "ols", system;
  double eps = 0.1;
};

int run_estimate(const EstimateOptions& opt) {
  const pclq::Dataset ds = pclq::read_dataset_file(opt.data);
  const pclq::EstimatorKind kind = parse_kind(opt.kind);
  const pclq::ThresholdedModel model = pclq::build_thresholded_model(ds, opt.eps, kind);

  pclq::TextDoc doc("estimate");
  doc.set_scalar("estimator", pclq::estimator_kind_name(kind));
  doc.set_scalar("eps", opt.eps);
  doc.set_scalar("degenerate_entries",
                 static_cast<std::int64_t>(model.estimate.degenerate_entries));
  doc.set_matrix("A_hat", model.estimate.a_hat);
  doc.set_matrix("B_hat", model.estimate.b_hat);
  doc.set_matrix("A_bar", model.a_bar);
  doc.set_matrix("B_bar", model.b_bar);
  doc.save(opt.out);

  const auto count_zeros = [](const Eigen::MatrixXd& m) {
    Eigen::Index zeros = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, j) == 0.0) ++zeros;
      }
    }
    return zeros;
  };
  std::cout << "estimator " << pclq::estimator_kind_name(kind) << "\n";
  std::cout << "a_bar_zeros " << count_zeros(model.a_bar) << " of "
            << model.a_bar.size() << "\n";
  std::cout << "b_bar_zeros " << count_zeros(model.b_bar) << " of "
            << model.b_bar.size() << "\n";
  if (model.estimate.degenerate_entries > 0) {
    std::cout << "degenerate_entries " << model.estimate.degenerate_entries << "\n";
  }
  if (!opt.system.empty()) {
    const pclq::LoadedSystem truth = pclq::read_system_file(opt.system);
    Eigen::Index false_positives = 0;
    Eigen::Index true_zeros = 0;
    for (Eigen::Index j = 0; j < truth.system.a.cols(); ++j) {
      for (Eigen::Index i = 0; i < truth.system.a.rows(); ++i) {
        if (truth.system.a(i, j) == 0.0) {
          ++true_zeros;
          if (model.a_bar(i, j) != 0.0) ++false_positives;
        }
      }
    }
    std::cout << "a_true_zeros " << true_zeros << "\n";
    std::cout << "a_false_positive_zeros " << false_positives << "\n";
  }
  return 0;
}

struct SolveOptions {
  std::string system;
  double tol = 1e-10;
  std::int64_t max_iter = 100000;
};

int run_solve(const SolveOptions& opt) {
  const pclq::LoadedSystem loaded = pclq::read_system_file(opt.system);
  const pclq::RiccatiSolution sol =
      pclq::solve_dare_value_iteration(loaded.system, opt.tol, opt.max_iter);
  std::cout << "d " << loaded.system.state_dim() << "\n";
  std::cout << "iterations " << sol.iterations << "\n";
  std::cout << "residual " << pclq::format_full(sol.residual) << "\n";
  print_matrix("P", sol.p);
  print_matrix("K", sol.k);
  const pclq::StabilityReport report =
      pclq::spectral_radius_estimate(pclq::closed_loop(loaded.system, sol.k));
  std::cout << "closed_loop_stable " << (report.is_stable ? 1 : 0) << "\n";
  std::cout << "closed_loop_radius_estimate " << pclq::format_full(report.radius_estimate)
            << "\n";
  return 0;
}

struct StructureOptions {
  std::string system;
  double tol_factor = 1e-9;
};

int run_structure(const StructureOptions& opt) {
  const pclq::LoadedSystem loaded = pclq::read_system_file(opt.system);
  const Eigen::MatrixXd gamma =
      pclq::controllability_matrix(loaded.system.a, loaded.system.b);
  const pclq::PcPartition part =
      pclq::pc_decompose(loaded.system.a, loaded.system.b, opt.tol_factor);
  const Eigen::MatrixXd rd =
      pclq::relevant_disturbances_matrix(loaded.system.a, part.p_c, opt.tol_factor);

  std::cout << "controllability_rank " << pclq::numeric_rank(gamma, opt.tol_factor)
            << "\n";
  std::cout << "relevant_disturbances_rank " << pclq::numeric_rank(rd, opt.tol_factor)
            << "\n";
  std::cout << "pb_dim " << part.p_b.dim() << "\n";
  std::cout << "pc_dim " << part.p_c.dim() << "\n";
  std::cout << "pr_dim " << part.p_r.dim() << "\n";
  std::cout << "decompose_residual " << pclq::format_full(part.residual) << "\n";

  const pclq::SparsityBlocks blocks =
      loaded.blocks ? *loaded.blocks
                    : pclq::block_partition_sparsity(loaded.system.a, loaded.system.b);
  Eigen::MatrixXd a3(static_cast<Eigen::Index>(blocks.block3.size()),
                     static_cast<Eigen::Index>(blocks.block3.size()));
  for (std::size_t i = 0; i < blocks.block3.size(); ++i) {
    for (std::size_t j = 0; j < blocks.block3.size(); ++j) {
      a3(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          loaded.system.a(blocks.block3[i], blocks.block3[j]);
    }
  }
  std::cout << "block_sizes " << blocks.block1.size() << " " << blocks.block2.size()
            << " " << blocks.block3.size() << "\n";
  std::cout << "a3_linf " << pclq::format_full(pclq::linf_block_norm(a3)) << "\n";
  return 0;
}

struct ExperimentOptions {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, threads;
  std::optional<double> eps, success_factor;
  std::vector<int> d_list, n_grid;
  std::vector<std::string> estimators;
};

int run_experiment(const ExperimentOptions& opt) {
  pclq::ExperimentConfig cfg;
  if (!opt.config.empty()) cfg = pclq::config_from_doc(pclq::TextDoc::load(opt.config));
  if (opt.seed) cfg.base_seed = *opt.seed;
  if (opt.trials) cfg.trials = *opt.trials;
  if (opt.threads) cfg.threads = *opt.threads;
  if (opt.eps) cfg.eps = *opt.eps;
  if (opt.success_factor) cfg.success_factor = *opt.success_factor;
  if (!opt.d_list.empty()) cfg.d_list = opt.d_list;
  if (!opt.n_grid.empty()) cfg.n_grid = opt.n_grid;
  if (!opt.estimators.empty()) {
    cfg.estimators.clear();
    for (const std::string& name : opt.estimators) {
      cfg.estimators.push_back(parse_kind(name));
    }
  }
  const std::vector<pclq::SweepRow> rows = pclq::run_sweep(cfg);
  pclq::emit_csv(rows, opt.out);
  std::cout << "wrote " << rows.size() << " sweep rows to " << opt.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning and control of partially controllable linear-quadratic systems"};
  app.require_subcommand(1);

  GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic system file");
  gen->add_option("--out", gen_opt.out, "Output system file")->required();
  gen->add_option("--seed", gen_opt.seed, "RNG seed");
  gen->add_option("--sc", gen_opt.s_c, "Controllable block size");
  gen->add_option("--se", gen_opt.s_e, "Relevant uncontrollable block size");
  gen->add_option("--d", gen_opt.d, "Ambient state dimension");
  gen->add_option("--du", gen_opt.d_u, "Input dimension");
  gen->add_option("--rho1", gen_opt.rho1, "Target spectral radius of block 1");
  gen->add_option("--rho2", gen_opt.rho2, "Target spectral radius of block 2");
  gen->add_option("--rho3", gen_opt.rho3, "Target spectral radius of block 3");
  gen->add_option("--q-mode", gen_opt.q_mode, "Cost matrix: i_onetwo or identity");
  gen->add_flag("--counterexample", gen_opt.counterexample,
                "Generate the single-controllable-coordinate family instead");
  gen->add_option("--rho", gen_opt.rho,
                  "Uncontrollable mode values for --counterexample (d-1 numbers)");

  SampleOptions sample_opt;
  CLI::App* sample = app.add_subcommand("sample", "Sample one-step transitions");
  sample->add_option("--system", sample_opt.system, "System file")->required();
  sample->add_option("--n", sample_opt.n, "Number of transitions")->required();
  sample->add_option("--sigma0", sample_opt.sigma0, "x0 standard deviation");
  sample->add_option("--sigma-u", sample_opt.sigma_u, "u0 standard deviation");
  sample->add_option("--sigma-xi", sample_opt.sigma_xi, "Process noise standard deviation");
  sample->add_option("--seed", sample_opt.seed, "RNG seed");
  sample->add_option("--out", sample_opt.out, "Output dataset file")->required();

  EstimateOptions est_opt;
  CLI::App* estimate = app.add_subcommand("estimate", "Identify dynamics from a dataset");
  estimate->add_option("--data", est_opt.data, "Dataset file")->required();
  estimate->add_option("--kind", est_opt.kind, "Estimator: ols, moment, or semiparam")
      ->required();
  estimate->add_option("--eps", est_opt.eps, "Soft threshold");
  estimate->add_option("--out", est_opt.out, "Output estimate file")->required();
  estimate->add_option("--system", est_opt.system,
                       "Optional true system file for a zero-pattern comparison");

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "Solve the DARE for a system file");
  solve->add_option("--system", solve_opt.system, "System file")->required();
  solve->add_option("--tol", solve_opt.tol, "Relative fixed-point tolerance");
  solve->add_option("--max-iter", solve_opt.max_iter, "Iteration budget");

  StructureOptions struct_opt;
  CLI::App* structure = app.add_subcommand("structure", "Report structural ranks");
  structure->add_option("--system", struct_opt.system, "System file")->required();
  structure->add_option("--tol-factor", struct_opt.tol_factor, "Rank tolerance factor");

  ExperimentOptions exp_opt;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a Monte-Carlo sweep");
  experiment->add_option("--config", exp_opt.config, "Experiment config file");
  experiment->add_option("--out", exp_opt.out, "Output CSV path")->required();
  experiment->add_option("--seed", exp_opt.seed, "Base seed override");
  experiment->add_option("--trials", exp_opt.trials, "Trials per cell override");
  experiment->add_option("--threads", exp_opt.threads, "Worker thread count");
  experiment->add_option("--eps", exp_opt.eps, "Soft threshold override");
  experiment->add_option("--success-factor", exp_opt.success_factor,
                         "Cost-ratio success threshold override");
  experiment->add_option("--d-list", exp_opt.d_list, "Ambient dimensions override");
  experiment->add_option("--n-grid", exp_opt.n_grid, "Sample-size grid override");
  experiment->add_option("--estimators", exp_opt.estimators, "Estimator tags override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message to stderr
    return 1;
  }

  try {
    if (gen->parsed()) return run_gen(gen_opt);
    if (sample->parsed()) return run_sample(sample_opt);
    if (estimate->parsed()) return run_estimate(est_opt);
    if (solve->parsed()) return run_solve(solve_opt);
    if (structure->parsed()) return run_structure(struct_opt);
    if (experiment->parsed()) return run_experiment(exp_opt);
  } catch (const pclq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
