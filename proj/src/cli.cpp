#include "covproj/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "covproj/errors.hpp"
#include "covproj/harness.hpp"
#include "covproj/matrix_io.hpp"
#include "covproj/projector.hpp"
#include "covproj/scenarios.hpp"

namespace covproj {
namespace {

struct NormChoice {
  NormKind kind = NormKind::kFrobenius;
  GaugeFn gauge;  // set for kGauge only
};

NormChoice norm_from_name(const std::string& name) {
  if (name == "fne") return {NormKind::kFrobenius, {}};
  if (name == "sne") return {NormKind::kSpectral, {}};
  if (name == "kyfan") return {NormKind::kGauge, kyfan_gauge()};
  throw std::invalid_argument("norm must be one of fne, sne, kyfan; got '" + name + "'");
}

GaugeFn objective_gauge(const NormChoice& choice) {
  switch (choice.kind) {
    case NormKind::kFrobenius:
      return euclidean_gauge();
    case NormKind::kSpectral:
      return max_gauge();
    case NormKind::kGauge:
      return choice.gauge;
  }
  throw std::logic_error("objective_gauge: unreachable");
}

int do_run(const std::string& config_path, const std::string& out_dir, int threads) {
  const ExperimentConfig config = load_config_file(config_path);
  const ExperimentResult result = run_experiment(config, threads);
  emit_results(result, out_dir);
  for (const std::string& w : result.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  std::cout << "experiment '" << config.experiment_id << "': " << result.curves.size()
            << " curves -> " << out_dir << "/results.csv (kappa " << std::setprecision(10)
            << result.kappa_used << ", " << result.threads_used << " threads, " << std::fixed
            << std::setprecision(2) << result.wall_seconds << " s)\n";
  return 0;
}

int do_project(const std::string& in_path, const std::string& out_path, double sigma2_db,
               double kappa, const std::string& norm_name) {
  const NormChoice choice = norm_from_name(norm_name);
  ProjectionConfig pc;
  pc.sigma2 = db_to_linear(sigma2_db);
  pc.kappa = kappa;
  pc.norm = choice.kind;
  pc.gauge = choice.gauge;
  const HermitianMatrix s_hat = read_matrix_file(in_path);
  const Projection pr = project(s_hat, pc);
  write_matrix_file(pr.m_hat, out_path);
  std::cout << std::setprecision(12) << "u_star    = " << pr.solution.u_star << "\n"
            << "branch    = " << to_string(pr.solution.branch) << "\n"
            << "objective = " << pr.solution.objective << "\n"
            << "wrote " << out_path << "\n";
  return 0;
}

int do_oracle(const std::string& in_path, double sigma2_db, double kappa,
              const std::string& norm_name, std::int64_t grid_points) {
  const NormChoice choice = norm_from_name(norm_name);
  const HermitianMatrix s_hat = read_matrix_file(in_path);
  const double sigma2 = db_to_linear(sigma2_db);
  const RVector d = eig_hermitian(normalize(s_hat, sigma2)).d;

  ShrinkageSolution sol;
  double u_grid = 0.0;
  switch (choice.kind) {
    case NormKind::kFrobenius:
      sol = solve_u_frobenius(d, kappa);
      u_grid = oracle_u(NormKind::kFrobenius, d, kappa, grid_points);
      break;
    case NormKind::kSpectral:
      sol = solve_u_spectral(d, kappa);
      u_grid = oracle_u(NormKind::kSpectral, d, kappa, grid_points);
      break;
    case NormKind::kGauge:
      sol = solve_u_generic(choice.gauge, d, kappa);
      u_grid = oracle_u(choice.gauge, d, kappa, grid_points);
      break;
  }
  const GaugeFn gauge = objective_gauge(choice);
  const double f_grid = gauge(abs_dev_at_u(d, u_grid, kappa));

  std::cout << std::setprecision(12) << "solver: u_star = " << sol.u_star
            << ", objective = " << sol.objective << ", branch = " << to_string(sol.branch) << "\n"
            << "grid:   u_star = " << u_grid << ", objective = " << f_grid << " (" << grid_points
            << " points)\n"
            << "delta:  u " << sol.u_star - u_grid << ", objective " << sol.objective - f_grid
            << "\n";
  return 0;
}

}  // namespace

int cli_main(std::vector<std::string> args) {
  CLI::App app{"disturbance covariance estimation by condition-number-constrained projection"};
  app.require_subcommand(1);

  std::string run_config;
  std::string run_out;
  int run_threads = 0;
  CLI::App* run = app.add_subcommand("run", "run a Monte Carlo SINR experiment");
  run->add_option("--config", run_config, "experiment config (JSON)")->required();
  run->add_option("--out", run_out, "output directory for results.csv/results.json")->required();
  run->add_option("--threads", run_threads,
                  "worker threads (0 = COVPROJ_THREADS or hardware default)");

  std::string p_in;
  std::string p_out;
  double p_sigma2_db = 0.0;
  double p_kappa = 1.0;
  std::string p_norm;
  CLI::App* proj = app.add_subcommand("project", "project one sample covariance matrix");
  proj->add_option("--input", p_in, "sample covariance (matrix JSON)")->required();
  proj->add_option("--sigma2-db", p_sigma2_db, "white floor in dB")->required();
  proj->add_option("--kappa", p_kappa, "condition-number cap (>= 1)")->required();
  proj->add_option("--norm", p_norm, "fne | sne | kyfan")->required();
  proj->add_option("--out", p_out, "output path for the estimate (matrix JSON)")->required();

  std::string o_in;
  double o_sigma2_db = 0.0;
  double o_kappa = 1.0;
  std::string o_norm;
  std::int64_t o_grid_points = 1000001;
  CLI::App* oracle = app.add_subcommand("oracle", "compare a solver against the grid oracle");
  oracle->add_option("--input", o_in, "sample covariance (matrix JSON)")->required();
  oracle->add_option("--sigma2-db", o_sigma2_db, "white floor in dB")->required();
  oracle->add_option("--kappa", o_kappa, "condition-number cap (>= 1)")->required();
  oracle->add_option("--norm", o_norm, "fne | sne | kyfan")->required();
  oracle->add_option("--grid-points", o_grid_points, "grid resolution (default 1000001)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return do_run(run_config, run_out, run_threads);
    if (proj->parsed()) return do_project(p_in, p_out, p_sigma2_db, p_kappa, p_norm);
    if (oracle->parsed()) return do_oracle(o_in, o_sigma2_db, o_kappa, o_norm, o_grid_points);
    std::cerr << "error: no subcommand given\n";
    return 1;
  } catch (const NumericalError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace covproj
