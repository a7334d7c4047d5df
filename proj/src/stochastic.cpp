#include "etclab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "etclab/csv.hpp"
#include "etclab/errors.hpp"
#include "etclab/rng.hpp"

namespace etclab {

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = rng_.next_uniform();  // (0,1], safe for log
  const double u2 = rng_.next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

int worker_count() {
  if (const char* env = std::getenv("ETCLAB_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed >= 1) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double optimal_threshold(int n, double mu) {
  if (n < 1) throw ConfigError("optimal_threshold: n must be >= 1");
  if (!(mu > 0.0)) {
    throw ZeroTradeoff("optimal_threshold: undefined for mu = 0");
  }
  return std::sqrt(2.0 * mu * (n + 2));
}

PredictedCosts predicted_costs(int n, double mu) {
  if (n < 1 || !(mu > 0.0)) {
    throw ConfigError("predicted_costs: need n >= 1 and mu > 0");
  }
  PredictedCosts out;
  out.j_ttc = std::sqrt(2.0 * n * mu);
  out.ratio = static_cast<double>(n) / (n + 2);
  out.j_etc = out.j_ttc * std::sqrt(out.ratio);
  return out;
}

namespace {

enum class ResetKind { kThreshold, kPeriodic };

struct TrajBatches {
  std::vector<double> cost;       // Σ|x|²·dt per batch
  std::vector<long long> events;  // resets per batch
};

void check_config(const IntegratorModel& model, const McConfig& cfg) {
  if (model.n < 1 || !(model.mu >= 0.0) || !(model.noise_scale >= 0.0)) {
    throw ConfigError("IntegratorModel: need n >= 1, mu >= 0, noise >= 0");
  }
  if (cfg.trajectories < 1 || !(cfg.dt > 0.0) || !(cfg.horizon > cfg.dt)) {
    throw ConfigError("McConfig: need trajectories >= 1 and horizon > dt > 0");
  }
}

TrajBatches run_trajectory(const IntegratorModel& model, ResetKind kind,
                           double param, const McConfig& cfg, int traj_index,
                           int batches, long long steps_per_batch) {
  GaussianStream gauss(substream_seed(cfg.seed, traj_index));
  const int n = model.n;
  const double dt = cfg.dt;
  const double sqrt_dt = std::sqrt(dt) * model.noise_scale;
  const long long period_steps =
      kind == ResetKind::kPeriodic
          ? std::max<long long>(1, std::llround(param / dt))
          : 0;

  std::vector<double> x(n, 0.0);
  double norm2 = 0.0;
  long long since_reset = 0;

  TrajBatches out;
  out.cost.resize(batches, 0.0);
  out.events.resize(batches, 0);
  for (int b = 0; b < batches; ++b) {
    double cost = 0.0;
    long long events = 0;
    for (long long s = 0; s < steps_per_batch; ++s) {
      cost += norm2 * dt;
      norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        x[i] += sqrt_dt * gauss.next();
        norm2 += x[i] * x[i];
      }
      if (kind == ResetKind::kThreshold) {
        if (norm2 >= param) {
          ++events;
          std::fill(x.begin(), x.end(), 0.0);
          norm2 = 0.0;
        }
      } else {
        if (++since_reset == period_steps) {
          ++events;
          std::fill(x.begin(), x.end(), 0.0);
          norm2 = 0.0;
          since_reset = 0;
        }
      }
    }
    out.cost[b] = cost;
    out.events[b] = events;
  }
  return out;
}

McReport aggregate(const IntegratorModel& model, ResetKind kind, double param,
                   const McConfig& cfg) {
  check_config(model, cfg);
  const long long steps = std::llround(cfg.horizon / cfg.dt);
  const int batches_per_traj = std::max(
      1, static_cast<int>((32 + cfg.trajectories - 1) / cfg.trajectories));
  const long long steps_per_batch = steps / batches_per_traj;
  if (steps_per_batch < 1) {
    throw ConfigError("McConfig: horizon too short for batch means");
  }

  std::vector<TrajBatches> results(cfg.trajectories);
  const int workers = std::min(worker_count(), cfg.trajectories);
  if (workers <= 1) {
    for (int i = 0; i < cfg.trajectories; ++i) {
      results[i] = run_trajectory(model, kind, param, cfg, i, batches_per_traj,
                                  steps_per_batch);
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < cfg.trajectories; i += workers) {
          results[i] = run_trajectory(model, kind, param, cfg, i,
                                      batches_per_traj, steps_per_batch);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Fixed (trajectory, batch) order keeps aggregation deterministic
  // regardless of scheduling.
  const double batch_time = steps_per_batch * cfg.dt;
  std::vector<double> j_batches;
  std::vector<double> rate_batches;
  j_batches.reserve(cfg.trajectories * batches_per_traj);
  for (const auto& tb : results) {
    for (int b = 0; b < batches_per_traj; ++b) {
      j_batches.push_back(tb.cost[b] / batch_time);
      rate_batches.push_back(static_cast<double>(tb.events[b]) / batch_time);
    }
  }
  const auto mean_ci = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double a : v) mean += a;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double a : v) var += (a - mean) * (a - mean);
    var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
    const double ci = 1.96 * std::sqrt(var / static_cast<double>(v.size()));
    return std::pair<double, double>(mean, ci);
  };

  McReport report;
  report.n = model.n;
  report.mu = model.mu;
  report.rho_or_h = param;
  std::tie(report.j_tilde, report.ci_j_tilde) = mean_ci(j_batches);
  std::tie(report.rate, report.ci_rate) = mean_ci(rate_batches);
  if (kind == ResetKind::kPeriodic) {
    report.rate = 1.0 / param;  // exact by construction
    report.ci_rate = 0.0;
  }
  report.j_total = report.j_tilde + model.mu * report.rate;
  report.trajectories = cfg.trajectories;
  report.horizon = cfg.horizon;
  report.dt = cfg.dt;
  report.seed = cfg.seed;
  if (kind == ResetKind::kThreshold &&
      cfg.dt > param / (100.0 * model.n)) {
    report.warning = "StepTooCoarse";
  }
  return report;
}

}  // namespace

McReport simulate_etc_integrator(const IntegratorModel& model, double rho,
                                 const McConfig& cfg) {
  if (!(rho > 0.0)) {
    throw ConfigError("simulate_etc_integrator: rho must be positive");
  }
  return aggregate(model, ResetKind::kThreshold, rho, cfg);
}

McReport simulate_ttc_integrator(const IntegratorModel& model, double period,
                                 const McConfig& cfg) {
  if (!(period > 0.0)) {
    throw ConfigError("simulate_ttc_integrator: period must be positive");
  }
  return aggregate(model, ResetKind::kPeriodic, period, cfg);
}

std::vector<McReport> threshold_sweep(const IntegratorModel& model,
                                      const std::vector<double>& rhos,
                                      const McConfig& cfg) {
  std::vector<McReport> out;
  out.reserve(rhos.size());
  for (double rho : rhos) {
    out.push_back(simulate_etc_integrator(model, rho, cfg));  // common seeds
  }
  return out;
}

namespace {

ScalarTrace record_trace(ResetKind kind, double param, double horizon,
                         double dt, std::uint64_t key, int stride) {
  GaussianStream gauss(key);
  ScalarTrace trace;
  const long long steps = std::llround(horizon / dt);
  const long long period_steps =
      kind == ResetKind::kPeriodic
          ? std::max<long long>(1, std::llround(param / dt))
          : 0;
  const double sqrt_dt = std::sqrt(dt);
  double x = 0.0;
  long long since_reset = 0;
  trace.t.push_back(0.0);
  trace.x.push_back(0.0);
  for (long long s = 1; s <= steps; ++s) {
    x += sqrt_dt * gauss.next();
    const double t = s * dt;
    bool reset = false;
    if (kind == ResetKind::kThreshold) {
      reset = x * x >= param;
    } else {
      reset = ++since_reset == period_steps;
      if (reset) since_reset = 0;
    }
    if (reset) {
      trace.event_times.push_back(t);
      x = 0.0;
    }
    if (s % stride == 0 || reset) {
      trace.t.push_back(t);
      trace.x.push_back(x);
    }
  }
  return trace;
}

}  // namespace

Figure12Result figure12_experiment(std::uint64_t seed) {
  Figure12Result result;
  result.threshold = std::sqrt(0.5);  // matched E[τ] = 0.5 s in 1-D
  result.period = 0.5;

  IntegratorModel model;
  model.n = 1;
  model.mu = 0.0;

  McConfig est;
  est.trajectories = 4;
  est.horizon = 1500.0;
  est.dt = 1e-4;

  est.seed = mix64(seed + 1);
  result.etc = simulate_etc_integrator(model, 0.5, est);
  est.seed = mix64(seed + 2);
  result.ttc = simulate_ttc_integrator(model, 0.5, est);
  result.ratio = result.etc.j_tilde / result.ttc.j_tilde;

  result.etc_trace = record_trace(ResetKind::kThreshold, 0.5, 20.0, 1e-4,
                                  mix64(seed + 3), 100);
  result.ttc_trace = record_trace(ResetKind::kPeriodic, 0.5, 20.0, 1e-4,
                                  mix64(seed + 4), 100);
  return result;
}

std::string mc_report_csv(const McReport& r) {
  std::string out = "n,mu,rho_or_h,Jtilde,rate,J,ci_Jtilde,ci_rate,N,T,dt,seed\n";
  out += std::to_string(r.n) + "," + format_double(r.mu) + "," +
         format_double(r.rho_or_h) + "," + format_double(r.j_tilde) + "," +
         format_double(r.rate) + "," + format_double(r.j_total) + "," +
         format_double(r.ci_j_tilde) + "," + format_double(r.ci_rate) + "," +
         std::to_string(r.trajectories) + "," + format_double(r.horizon) +
         "," + format_double(r.dt) + "," + std::to_string(r.seed) + "\n";
  return out;
}

std::string mc_report_json(const McReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["mu"] = r.mu;
  j["rho_or_h"] = r.rho_or_h;
  j["Jtilde"] = r.j_tilde;
  j["rate"] = r.rate;
  j["J"] = r.j_total;
  j["ci_Jtilde"] = r.ci_j_tilde;
  j["ci_rate"] = r.ci_rate;
  j["N"] = r.trajectories;
  j["T"] = r.horizon;
  j["dt"] = r.dt;
  j["seed"] = r.seed;
  j["warning"] = r.warning;
  return j.dump(2) + "\n";
}

}  // namespace etclab
