#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace etclab {

/// Minimum information access rate (bits/s) for stabilization under periodic
/// sampling: (1/ln 2)·Σ Re λ_i(A) over eigenvalues with positive real part
/// (the inherent entropy rate). Zero for Hurwitz A.
double ttc_min_rate(const Eigen::MatrixXd& a);

/// Worst-case lower bound (bits/s) on the information access rate of the
/// scalar decaying-threshold ETC scheme:
///   (A+ψ)/(ln ν + ln(2 + e^{ψΔ̄}/ρ₀)) · max{0, log₂((e^{AΔ̄}−1)/(ρ₀e^{−ψΔ̄}))}.
/// The numerator log is base 2 so that rates are in bits/s, matching the
/// 1/ln 2 factor of ttc_min_rate. ψ = 0 gives the undiscounted bound.
double etc_rate_lower_bound(double a, double psi, double nu, double rho0,
                            double delta_bar);

/// Delay bound beyond which the worst-case ETC rate exceeds the periodic
/// requirement: Δ* = (1/A)·ln(1 + ν(2ρ₀+1)). Requires A > 0 (throws
/// Unsupported otherwise); at Δ̄ = Δ* the two rates coincide exactly.
double breakeven_delay(double a, double nu, double rho0);

/// Rate-limited channel between sensor and controller for the scalar
/// estimation loop with decaying trigger threshold v(t) = v₀e^{−ψt}.
struct ChannelSpec {
  double delta_bar = 0.1;  // delay bound Δ̄ (s)
  double nu = 8.0;         // quantizer precision ν > 1
  double rho0 = 0.5;       // contraction factor ρ₀ ∈ (0,1)
  double psi = 0.0;        // threshold decay rate (1/s)
  double v0 = 1.0;         // initial threshold
};

/// Throws ConfigError on parameter-range violations, including the required
/// contraction margin ρ₀·e^{−ψΔ̄} < 1.
void validate(const ChannelSpec& ch);

enum class DelayKind { kZero, kConstant, kUniform };

struct DelayDraw {
  DelayKind kind = DelayKind::kUniform;
  double value = 0.0;  // constant delay (kConstant only), ≤ Δ̄
};

struct RateReport {
  long long bits = 0;
  long long events = 0;
  double horizon = 0.0;
  double empirical_rate = 0.0;  // bits / horizon (bits/s)
  double r_ttc = 0.0;           // periodic bound for the scalar plant
  double r_etc_bound = 0.0;     // worst-case ETC bound for these parameters
  double max_growth_ratio = 0.0;      // max |z(t_c)| / (e^{AΔ̄} v(t_s))
  double max_contraction_ratio = 0.0; // max |z(t_c+)| / (ρ₀e^{−ψΔ̄} v(t_s))
  std::vector<double> send_times;
  std::vector<double> reception_times;
};

/// Event-driven simulation of the scalar plant ẋ = Ax + Bû with û = K x̂:
/// the estimation error z = x − x̂ flows as ż = Az between receptions, a
/// packet is sent when |z(t)| reaches v(t) (only after the previous packet
/// arrived), travels for a drawn delay ≤ Δ̄, and on reception the estimator
/// jump leaves |z| at the certified residual ρ₀e^{−ψΔ̄}v(t_j^s). Each packet
/// carries ⌈log₂⌈ν⌉⌉ + 1 bits (uniform cells over the reachable z-interval
/// plus a sign bit). Flows are exact scalar exponentials; no time stepping.
///
/// Throws QuantizerTooCoarse when ⌈ν⌉ cells cannot satisfy the contraction,
/// i.e. ⌈ν⌉ < e^{ψΔ̄}|e^{(A+ψ)Δ̄} − 1|/(2ρ₀).
RateReport simulate_scalar_channel(double a, double b, double k,
                                   const ChannelSpec& ch,
                                   const DelayDraw& delay, double horizon,
                                   double z0, std::uint64_t seed);

}  // namespace etclab
