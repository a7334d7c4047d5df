#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace etclab {

/// n-dimensional single integrator dx = u dt + dv driven by a standard
/// Wiener process, controlled by impulses that reset the state to the
/// origin at sampling instants. noise_scale = 0 disables the noise (debug).
struct IntegratorModel {
  int n = 1;
  double mu = 1.0;  // trade-off weight on the sampling rate (>= 0)
  double noise_scale = 1.0;
};

struct McConfig {
  int trajectories = 1;
  double horizon = 100.0;  // per-trajectory time (s)
  double dt = 1e-4;        // Euler–Maruyama step (s)
  std::uint64_t seed = 1;
};

/// Monte Carlo estimates with 95% batch-means confidence half-widths.
struct McReport {
  int n = 1;
  double mu = 0.0;
  double rho_or_h = 0.0;  // threshold ρ (ETC) or period h (TTC)
  double j_tilde = 0.0;   // time-average of E∫|x|²dt
  double rate = 0.0;      // sampling rate 1/E[τ]
  double j_total = 0.0;   // j_tilde + mu·rate
  double ci_j_tilde = 0.0;
  double ci_rate = 0.0;
  int trajectories = 0;
  double horizon = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::string warning;  // "StepTooCoarse" when dt > ρ/(100n); empty otherwise
};

/// Cost-optimal squared-norm threshold ρ* = √(2μ(n+2)).
/// Throws ZeroTradeoff for μ = 0.
double optimal_threshold(int n, double mu);

/// Closed-form benchmark costs: optimal event-triggered trade-off cost
/// √(2nμ)·√(n/(n+2)), optimal periodic cost √(2nμ), and the matched-rate
/// state-cost ratio n/(n+2).
struct PredictedCosts {
  double j_etc = 0.0;
  double j_ttc = 0.0;
  double ratio = 0.0;
};
PredictedCosts predicted_costs(int n, double mu);

/// Event-triggered run: impulsive reset to 0 whenever |x|² ≥ ρ (checked each
/// step). Deterministic for a fixed seed; trajectories use counter-derived
/// substreams and may execute in parallel (ETCLAB_THREADS caps workers).
McReport simulate_etc_integrator(const IntegratorModel& model, double rho,
                                 const McConfig& cfg);

/// Periodic run: impulsive reset every `period` seconds; the reported rate
/// is 1/period exactly.
McReport simulate_ttc_integrator(const IntegratorModel& model, double period,
                                 const McConfig& cfg);

/// Sweeps the ETC threshold over the given values with common random
/// numbers (the same seed for every point).
std::vector<McReport> threshold_sweep(const IntegratorModel& model,
                                      const std::vector<double>& rhos,
                                      const McConfig& cfg);

/// Scalar trace with its event instants (for plot export).
struct ScalarTrace {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> event_times;
};

/// 1-D benchmark with matched expected inter-event time 0.5 s: periodic
/// resets at 0.5 s versus the absolute threshold |x| = √0.5 ≈ 0.7071.
/// Produces plot traces and long-run cost estimates for both schemes.
struct Figure12Result {
  double threshold = 0.0;  // √0.5, on |x|
  double period = 0.5;
  McReport etc;
  McReport ttc;
  ScalarTrace etc_trace;
  ScalarTrace ttc_trace;
  double ratio = 0.0;  // J̃_etc / J̃_ttc
};
Figure12Result figure12_experiment(std::uint64_t seed);

/// Single-row CSV (header + row) with the report fields.
std::string mc_report_csv(const McReport& report);

/// The same fields as JSON.
std::string mc_report_json(const McReport& report);

/// Worker cap: ETCLAB_THREADS when set, else hardware concurrency.
int worker_count();

}  // namespace etclab
