#ifndef COVPROJ_HARNESS_HPP
#define COVPROJ_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "covproj/hermitian.hpp"
#include "covproj/scenarios.hpp"

namespace covproj {

// Source of the projector's condition-number cap: measured on the true
// covariance (the benchmark convention) or supplied explicitly.
enum class KappaMode { kTrue, kExplicit };

struct ExperimentConfig {
  std::string experiment_id;
  Scenario scenario;
  std::vector<int> k_values;  // sample-support sizes to sweep
  int mc = 500;               // Monte Carlo trials per support size
  std::uint64_t seed = 1;
  std::vector<double> grid;   // target states: theta in degrees or nu
  std::vector<std::string> estimators;
  double sigma2_db = 0.0;     // projector floor in dB
  KappaMode kappa_mode = KappaMode::kTrue;
  double kappa = 1.0;         // used only when kappa_mode == kExplicit
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config_file(const std::string& path);

// Average SINR across trials (linear average, then dB) for one estimator
// at one support size, together with the clairvoyant bound on the same
// grid. failed_trials counts trials where the estimator threw.
struct SinrCurve {
  std::string estimator;
  int k = 0;
  std::vector<double> grid;
  std::vector<double> sinr_av_db;
  std::vector<double> bound_db;
  int failed_trials = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  double kappa_used = 1.0;
  std::vector<SinrCurve> curves;  // config order; bound pseudo-curve last per K
  std::vector<std::string> warnings;
  std::int64_t floored_evaluations = 0;  // zero-SINR (trial, grid) evaluations
  double max_bound_violation = 0.0;      // max over trials of (sinr - bound)/bound
  double wall_seconds = 0.0;             // reported in run_meta.json only
  int threads_used = 1;
};

// Per-trial SINR |w^H s|^2 / (w^H m_true w) with w = solve_weight(m_hat, s).
// A vanishing weight (pathological pseudo-inverse result) yields 0.
double sinr_trial(const HermitianMatrix& m_hat, const HermitianMatrix& m_true, const CVector& s);

// Clairvoyant ceiling s^H m_true^{-1} s; throws on singular m_true.
double sinr_bound(const HermitianMatrix& m_true, const CVector& s);

// dB with a -300 dB floor (also the value reported for zero power).
double floor_db(double linear);

// requested > 0 wins, else COVPROJ_THREADS, else hardware concurrency.
int resolve_thread_count(int requested);

// Runs the full sweep. Trials are distributed across threads; every trial
// draws its data from a stream derived from (seed, trial index) and the
// reduction walks trials in index order, so the result is bit-identical
// for any thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 0);

// Writes results.csv, results.json and run_meta.json into out_dir
// (created if needed). Only run_meta.json carries timing, so the other
// two are byte-stable for a fixed config and seed.
void emit_results(const ExperimentResult& result, const std::string& out_dir);

// Reads back the curves of an emitted results.json.
std::vector<SinrCurve> load_results_json(const std::string& path);

}  // namespace covproj

#endif
