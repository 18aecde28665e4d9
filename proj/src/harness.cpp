#include "covproj/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include "covproj/errors.hpp"
#include "covproj/estimators.hpp"
#include "covproj/tolerances.hpp"
#include "covproj/version.hpp"

namespace covproj {
namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("config: missing field '") + name + "'");
  }
  return *it;
}

template <typename T>
T get_field(const nlohmann::json& j, const char* name) {
  try {
    return require_field(j, name).get<T>();
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument(std::string("config: field '") + name + "': " + ex.what());
  }
}

void validate_config(const ExperimentConfig& c) {
  if (c.experiment_id.empty()) {
    throw std::invalid_argument("config: experiment_id must be non-empty");
  }
  if (c.mc < 1) {
    throw std::invalid_argument("config: mc must be >= 1, got " + std::to_string(c.mc));
  }
  if (c.k_values.empty()) {
    throw std::invalid_argument("config: k_values must be non-empty");
  }
  for (const int k : c.k_values) {
    if (k < 1) {
      throw std::invalid_argument("config: k_values entries must be >= 1, got " +
                                  std::to_string(k));
    }
  }
  if (c.grid.empty()) {
    throw std::invalid_argument("config: grid must be non-empty");
  }
  for (const double g : c.grid) {
    if (!std::isfinite(g)) {
      throw std::invalid_argument("config: grid values must be finite");
    }
  }
  if (c.estimators.empty()) {
    throw std::invalid_argument("config: estimators must be non-empty");
  }
  if (c.kappa_mode == KappaMode::kExplicit && !(c.kappa >= 1.0)) {
    throw std::invalid_argument("config: explicit kappa must be >= 1, got " +
                                std::to_string(c.kappa));
  }
}

// Runs body(0..count-1) on the given number of workers. Each index is
// processed exactly once; any escaping exception is rethrown after join.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto work = [&]() {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

nlohmann::json curves_to_json(const std::vector<SinrCurve>& curves) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SinrCurve& c : curves) {
    arr.push_back({{"estimator", c.estimator},
                   {"k", c.k},
                   {"grid", c.grid},
                   {"sinr_av_db", c.sinr_av_db},
                   {"bound_db", c.bound_db},
                   {"failed_trials", c.failed_trials}});
  }
  return arr;
}

nlohmann::json decisions_json(const ExperimentResult& r) {
  return {{"sinc", r.config.scenario.sinc == SincConvention::kUnnormalized ? "unnormalized"
                                                                           : "normalized"},
          {"texture_gamma", "shape 1/mu_tau, scale mu_tau (unit mean)"},
          {"fpe_initialization", "nscm"},
          {"fpe_normalization", "trace fixed to n each iteration"},
          {"sinr_averaging", "linear mean over trials, then dB"},
          {"kappa_source",
           r.config.kappa_mode == KappaMode::kTrue ? "true-covariance" : "explicit"}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("emit_results: cannot open '" + path + "' for writing");
  }
  f << text;
  f.flush();
  if (!f) {
    throw std::runtime_error("emit_results: write failed for '" + path + "'");
  }
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("config: expected a JSON object");
  }
  ExperimentConfig c;
  c.experiment_id = get_field<std::string>(j, "experiment_id");
  c.scenario = scenario_from_json(require_field(j, "scenario"));
  c.k_values = get_field<std::vector<int>>(j, "k_values");
  c.mc = get_field<int>(j, "mc");
  c.seed = get_field<std::uint64_t>(j, "seed");
  c.grid = get_field<std::vector<double>>(j, "grid");
  c.estimators = get_field<std::vector<std::string>>(j, "estimators");
  c.sigma2_db = get_field<double>(j, "sigma2_db");
  const std::string mode = get_field<std::string>(j, "kappa_mode");
  if (mode == "true") {
    c.kappa_mode = KappaMode::kTrue;
  } else if (mode == "explicit") {
    c.kappa_mode = KappaMode::kExplicit;
    c.kappa = get_field<double>(j, "kappa");
  } else {
    throw std::invalid_argument("config: kappa_mode must be \"true\" or \"explicit\", got \"" +
                                mode + "\"");
  }
  validate_config(c);
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"experiment_id", c.experiment_id},
                   {"scenario", scenario_to_json(c.scenario)},
                   {"k_values", c.k_values},
                   {"mc", c.mc},
                   {"seed", c.seed},
                   {"grid", c.grid},
                   {"estimators", c.estimators},
                   {"sigma2_db", c.sigma2_db},
                   {"kappa_mode", c.kappa_mode == KappaMode::kTrue ? "true" : "explicit"}};
  if (c.kappa_mode == KappaMode::kExplicit) j["kappa"] = c.kappa;
  return j;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::invalid_argument("load_config_file: cannot open '" + path + "'");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& ex) {
    throw std::invalid_argument("load_config_file: '" + path + "': " + ex.what());
  }
  try {
    return config_from_json(j);
  } catch (const std::invalid_argument& ex) {
    throw std::invalid_argument("load_config_file: '" + path + "': " + ex.what());
  }
}

double floor_db(double linear) {
  if (!(linear > 0.0)) return tol::kDbFloor;
  return std::max(tol::kDbFloor, linear_to_db(linear));
}

double sinr_trial(const HermitianMatrix& m_hat, const HermitianMatrix& m_true, const CVector& s) {
  if (s.size() != m_true.dim() || m_hat.dim() != m_true.dim()) {
    throw std::invalid_argument("sinr_trial: dimension mismatch");
  }
  const CVector w = solve_weight(m_hat, s);
  const double num = std::norm(w.dot(s));
  const double den = w.dot(m_true.matrix() * w).real();
  if (!(num > 0.0) || !(den > 0.0)) return 0.0;
  return num / den;
}

double sinr_bound(const HermitianMatrix& m_true, const CVector& s) {
  if (s.size() != m_true.dim()) {
    throw std::invalid_argument("sinr_bound: dimension mismatch");
  }
  const HermitianSolver solver(m_true);
  if (solver.rank() < m_true.dim()) {
    throw NumericalError("sinr_bound: covariance is singular");
  }
  return s.dot(solver.solve(s)).real();
}

int resolve_thread_count(int requested) {
  if (requested < 0) {
    throw std::invalid_argument("resolve_thread_count: thread count must be >= 0");
  }
  if (requested > 0) return requested;
  if (const char* env = std::getenv("COVPROJ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096) {
      throw std::invalid_argument(std::string("COVPROJ_THREADS must be a positive integer, got '") +
                                  env + "'");
    }
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
  const auto t_start = std::chrono::steady_clock::now();
  validate_config(config);

  const HermitianMatrix colored = colored_covariance(config.scenario);
  const double noise_db = scenario_noise_power_db(config.scenario);
  const HermitianMatrix m_true = total_covariance(colored, noise_db);
  const double kappa_used =
      config.kappa_mode == KappaMode::kTrue ? true_kappa(m_true) : config.kappa;

  EstimatorContext ctx;
  ctx.sigma2 = db_to_linear(config.sigma2_db);
  ctx.kappa = kappa_used;
  ctx.m_true = &m_true;
  const int n_est = static_cast<int>(config.estimators.size());
  std::vector<Estimator> fns;
  fns.reserve(config.estimators.size());
  for (const std::string& name : config.estimators) fns.push_back(make_estimator(name, ctx));

  const int n_grid = static_cast<int>(config.grid.size());
  std::vector<CVector> steer;
  steer.reserve(config.grid.size());
  for (const double g : config.grid) steer.push_back(scenario_steering(config.scenario, g));

  const HermitianSolver true_solver(m_true);
  if (true_solver.rank() < m_true.dim()) {
    throw NumericalError("run_experiment: true covariance is singular");
  }
  std::vector<double> bound_linear(config.grid.size());
  std::vector<double> bound_db(config.grid.size());
  for (int g = 0; g < n_grid; ++g) {
    bound_linear[g] = steer[g].dot(true_solver.solve(steer[g])).real();
    bound_db[g] = floor_db(bound_linear[g]);
  }

  std::function<std::vector<CVector>(const RngStream&, int)> draw_set;
  if (config.scenario.texture.kind == TextureModel::Kind::kGaussian) {
    auto sampler = std::make_shared<GaussianSampler>(m_true);
    draw_set = [sampler](const RngStream& base, int k) { return sampler->draw_set(base, k); };
  } else {
    auto sampler =
        std::make_shared<CompoundSampler>(colored, noise_db, config.scenario.texture.mu_tau);
    draw_set = [sampler](const RngStream& base, int k) { return sampler->draw_set(base, k); };
  }

  const int threads_used = resolve_thread_count(threads);

  ExperimentResult out;
  out.config = config;
  out.kappa_used = kappa_used;
  out.threads_used = threads_used;

  // Per-trial scratch: SINR rows per estimator (empty on failure), the
  // first error text, the worst bound exceedance and the zero-SINR count.
  struct TrialSlot {
    std::vector<std::vector<double>> sinr;
    std::vector<std::string> error;
    double violation = 0.0;
    std::int64_t floored = 0;
  };

  for (const int k : config.k_values) {
    std::vector<TrialSlot> slots(static_cast<std::size_t>(config.mc));

    parallel_for(config.mc, threads_used, [&](int trial) {
      TrialSlot& slot = slots[static_cast<std::size_t>(trial)];
      slot.sinr.assign(static_cast<std::size_t>(n_est), {});
      slot.error.assign(static_cast<std::size_t>(n_est), {});
      const RngStream trial_stream =
          RngStream(config.seed).derive(static_cast<std::uint64_t>(trial));
      const std::vector<CVector> data = draw_set(trial_stream, k);
      for (int e = 0; e < n_est; ++e) {
        try {
          const HermitianMatrix m_hat = fns[static_cast<std::size_t>(e)](data);
          const HermitianSolver solver(m_hat);
          std::vector<double>& row = slot.sinr[static_cast<std::size_t>(e)];
          row.resize(static_cast<std::size_t>(n_grid));
          for (int g = 0; g < n_grid; ++g) {
            const CVector w = solver.solve(steer[static_cast<std::size_t>(g)]);
            const double num = std::norm(w.dot(steer[static_cast<std::size_t>(g)]));
            const double den = w.dot(m_true.matrix() * w).real();
            double v = 0.0;
            if (num > 0.0 && den > 0.0) v = num / den;
            if (v == 0.0) ++slot.floored;
            row[static_cast<std::size_t>(g)] = v;
            if (bound_linear[static_cast<std::size_t>(g)] > 0.0) {
              slot.violation = std::max(
                  slot.violation, v / bound_linear[static_cast<std::size_t>(g)] - 1.0);
            }
          }
        } catch (const std::exception& ex) {
          slot.sinr[static_cast<std::size_t>(e)].clear();
          slot.error[static_cast<std::size_t>(e)] = ex.what();
        }
      }
    });

    // Reduce in trial-index order so sums do not depend on scheduling.
    for (int e = 0; e < n_est; ++e) {
      std::vector<double> acc(static_cast<std::size_t>(n_grid), 0.0);
      int failed = 0;
      std::string first_error;
      for (int t = 0; t < config.mc; ++t) {
        const TrialSlot& slot = slots[static_cast<std::size_t>(t)];
        const std::vector<double>& row = slot.sinr[static_cast<std::size_t>(e)];
        if (row.empty()) {
          ++failed;
          if (first_error.empty()) first_error = slot.error[static_cast<std::size_t>(e)];
          continue;
        }
        for (int g = 0; g < n_grid; ++g) {
          acc[static_cast<std::size_t>(g)] += row[static_cast<std::size_t>(g)];
        }
      }
      const std::string& name = config.estimators[static_cast<std::size_t>(e)];
      if (failed == config.mc) {
        out.warnings.push_back("estimator '" + name + "' failed every trial at K=" +
                               std::to_string(k) + " (" + first_error + "); curve skipped");
        continue;
      }
      if (failed > 0) {
        out.warnings.push_back("estimator '" + name + "' failed " + std::to_string(failed) + "/" +
                               std::to_string(config.mc) + " trials at K=" + std::to_string(k) +
                               " (" + first_error + ")");
      }
      SinrCurve c;
      c.estimator = name;
      c.k = k;
      c.grid = config.grid;
      c.sinr_av_db.reserve(config.grid.size());
      for (int g = 0; g < n_grid; ++g) {
        c.sinr_av_db.push_back(
            floor_db(acc[static_cast<std::size_t>(g)] / static_cast<double>(config.mc - failed)));
      }
      c.bound_db = bound_db;
      c.failed_trials = failed;
      out.curves.push_back(std::move(c));
    }

    for (const TrialSlot& slot : slots) {
      out.floored_evaluations += slot.floored;
      out.max_bound_violation = std::max(out.max_bound_violation, slot.violation);
    }

    SinrCurve bound_curve;
    bound_curve.estimator = "bound";
    bound_curve.k = k;
    bound_curve.grid = config.grid;
    bound_curve.sinr_av_db = bound_db;
    bound_curve.bound_db = bound_db;
    out.curves.push_back(std::move(bound_curve));
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

void emit_results(const ExperimentResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(out_dir), ec);
  if (ec) {
    throw std::runtime_error("emit_results: cannot create directory '" + out_dir +
                             "': " + ec.message());
  }

  const std::string scenario_type = scenario_type_name(result.config.scenario);
  const double sigma_a_db = scenario_noise_power_db(result.config.scenario);

  std::string csv;
  csv += "experiment_id,scenario_type,estimator,K,mc,sigma_a_db,sigma2_db,kappa,grid_value,"
         "sinr_av_db,bound_db,failed_trials\n";
  for (const SinrCurve& c : result.curves) {
    for (std::size_t g = 0; g < c.grid.size(); ++g) {
      csv += result.config.experiment_id;
      csv += ',';
      csv += scenario_type;
      csv += ',';
      csv += c.estimator;
      csv += ',';
      csv += std::to_string(c.k);
      csv += ',';
      csv += std::to_string(result.config.mc);
      csv += ',';
      csv += fmt_double(sigma_a_db);
      csv += ',';
      csv += fmt_double(result.config.sigma2_db);
      csv += ',';
      csv += fmt_double(result.kappa_used);
      csv += ',';
      csv += fmt_double(c.grid[g]);
      csv += ',';
      csv += fmt_double(c.sinr_av_db[g]);
      csv += ',';
      csv += fmt_double(c.bound_db[g]);
      csv += ',';
      csv += std::to_string(c.failed_trials);
      csv += '\n';
    }
  }
  write_text_file((fs::path(out_dir) / "results.csv").string(), csv);

  const nlohmann::json results_json{
      {"experiment_id", result.config.experiment_id},
      {"curves", curves_to_json(result.curves)},
      {"metadata",
       {{"config", config_to_json(result.config)},
        {"kappa_used", result.kappa_used},
        {"version", kVersion},
        {"warnings", result.warnings},
        {"floored_evaluations", result.floored_evaluations},
        {"max_bound_violation", result.max_bound_violation},
        {"decisions", decisions_json(result)}}}};
  write_text_file((fs::path(out_dir) / "results.json").string(), results_json.dump(2) + "\n");

  const nlohmann::json meta{{"config", config_to_json(result.config)},
                            {"seed", result.config.seed},
                            {"kappa_used", result.kappa_used},
                            {"decisions", decisions_json(result)},
                            {"version", kVersion},
                            {"warnings", result.warnings},
                            {"threads", result.threads_used},
                            {"wall_seconds", result.wall_seconds}};
  write_text_file((fs::path(out_dir) / "run_meta.json").string(), meta.dump(2) + "\n");
}

std::vector<SinrCurve> load_results_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::invalid_argument("load_results_json: cannot open '" + path + "'");
  }
  try {
    const nlohmann::json j = nlohmann::json::parse(f);
    std::vector<SinrCurve> curves;
    for (const nlohmann::json& e : j.at("curves")) {
      SinrCurve c;
      c.estimator = e.at("estimator").get<std::string>();
      c.k = e.at("k").get<int>();
      c.grid = e.at("grid").get<std::vector<double>>();
      c.sinr_av_db = e.at("sinr_av_db").get<std::vector<double>>();
      c.bound_db = e.at("bound_db").get<std::vector<double>>();
      c.failed_trials = e.at("failed_trials").get<int>();
      curves.push_back(std::move(c));
    }
    return curves;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument("load_results_json: '" + path + "': " + ex.what());
  }
}

}  // namespace covproj
