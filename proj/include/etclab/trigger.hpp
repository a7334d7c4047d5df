#pragma once

#include <Eigen/Dense>
#include <limits>
#include <variant>

#include "etclab/plant.hpp"

namespace etclab {

/// Class-K∞ function restricted to the power family s ↦ λ·s^p (λ > 0, p > 0).
/// Covers every instance used by the triggering rules (linear, quadratic)
/// while keeping inverses closed-form.
struct KinfFn {
  double scale = 1.0;
  double exponent = 1.0;

  double operator()(double s) const;
  double inverse(double s) const;

  static KinfFn identity() { return {1.0, 1.0}; }
  static KinfFn quadratic(double scale) { return {scale, 2.0}; }
};

/// Throws ConfigError unless scale > 0 and exponent > 0.
void validate(const KinfFn& fn);

// --- Triggering mechanisms ------------------------------------------------
//
// Each rule fires when its trigger value is strictly positive. The strict
// inequality keeps the origin event-free: at x = 0, e = 0 both sides of
// every threshold comparison are zero.

/// Fires when γ(|e|) ≥ ρ.
struct AbsoluteRule {
  KinfFn gamma;
  double rho = 1.0;
};

/// Fires when γ(|e|) ≥ σ·α(|x|).
struct RelativeRule {
  KinfFn gamma;
  KinfFn alpha;
  double sigma = 0.5;  // in (0,1)
};

/// Space-regularized combination: fires when γ(|e|) ≥ σ·α(|x|) + ρ.
struct MixedRule {
  KinfFn gamma;
  KinfFn alpha;
  double sigma = 0.5;
  double rho = 0.0;
};

/// Internal variable η with η̇ = −β(η) + σα(|x|) − γ(|e|), η(0) = 0;
/// fires when η < 0.
struct DynamicRule {
  KinfFn beta;
  KinfFn alpha;
  KinfFn gamma;
  double sigma = 0.5;  // in (0,1)
};

/// Fires when V(x) ≥ (1 − σ(t − t_j))·V(x(t_j)) with V(x) = xᵀPx.
struct LyapunovDecreaseRule {
  Eigen::MatrixXd P;   // symmetric positive definite
  double sigma = 0.5;  // in (0,1)
};

/// Lp small-gain rule: fires when ‖W(|e|)‖_p[t_j,t] ≥ γ_e·‖H(|x|)‖_p[t_j,t].
/// p ∈ {1, 2, ∞}; running norms are accumulated alongside the flow.
struct LpGainRule {
  double p = 2.0;  // 1, 2, or infinity()
  double gamma_e = 0.5;
  KinfFn h_form;  // output map of the state subsystem, applied to |x|
  KinfFn w_form;  // output map of the error subsystem, applied to |e|

  static constexpr double infinity() {
    return std::numeric_limits<double>::infinity();
  }
};

/// Relaxed relative rule: fires when (1 − δ_r)·γ(|e|) ≥ σ·α(|x|).
struct RedesignedRelativeRule {
  KinfFn gamma;
  KinfFn alpha;
  double sigma = 0.5;
  double delta_r = 0.0;  // in [0, 1)
};

using TriggerRule =
    std::variant<AbsoluteRule, RelativeRule, MixedRule, DynamicRule,
                 LyapunovDecreaseRule, LpGainRule, RedesignedRelativeRule>;

/// Parameter-range check for any rule variant; throws ConfigError.
void validate(const TriggerRule& rule);

/// Admissible-range probe for the redesigned relative rule. The admissible
/// interval is δ_r ∈ (0, (1−σ)/(1+σ+σc)); the constant c is an explicit
/// input because it depends on the certificate bounds and has no closed form.
bool redesigned_delta_valid(double sigma, double c, double delta_r);

/// Small-gain feasibility helper for LpGainRule: γ_e·γ_x < 1.
bool lp_small_gain_ok(double gamma_e, double gamma_x);

/// Per-run mutable state carried alongside a rule.
struct TriggerState {
  double t_event = 0.0;               // last event time t_j
  Eigen::VectorXd x_event;            // state at last event
  double v_event = 0.0;               // V(x(t_j)) (LyapunovDecrease only)
  double eta = 0.0;                   // dynamic variable (Dynamic only)
  double acc_e = 0.0;                 // ∫|W|^p (or running sup for p = ∞)
  double acc_x = 0.0;                 // ∫|H|^p (or running sup)
  double prev_integrand_e = 0.0;      // trapezoid memory, |W(|e|)|^p at t
  double prev_integrand_x = 0.0;      // trapezoid memory, |H(|x|)|^p at t
};

/// Initial state at run start (t = t₀ counts as an event: e = 0).
TriggerState make_trigger_state(const TriggerRule& rule,
                                const Eigen::VectorXd& x0, double t0);

/// Trigger value at time t; the rule fires when the value is > 0.
/// For LyapunovDecreaseRule, a direct call with t − t_j ≥ 1/σ throws
/// ThresholdExpired (the simulator instead treats expiry as a mandatory
/// event; see simulate()).
double evaluate(const TriggerRule& rule, const TriggerState& st,
                const Eigen::VectorXd& x, const Eigen::VectorXd& e, double t);

/// Advances the rule's internal state by one explicit sub-step of length dt,
/// using (x, e) as the new endpoint. Trapezoidal quadrature for the Lp
/// accumulators, Heun step for η. Identity for memoryless rules.
TriggerState flow_update(const TriggerRule& rule, const TriggerState& st,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& e,
                         double dt);

/// Event update at time t: records (t_j, x_j), refreshes V_j, resets the Lp
/// accumulators. η is continuous across jumps (clamped at 0 to absorb the
/// event-localization undershoot).
TriggerState jump_update(const TriggerRule& rule, const TriggerState& st,
                         const Eigen::VectorXd& x, double t);

/// ISS certificate for a linear closed loop, from the Lyapunov equation
/// (A+BK)ᵀP + P(A+BK) = −I:
///   V(x) = xᵀPx,  V̇ ≤ −α(|x|) + γ(|e|)
/// with α(s) = ½s² and γ(s) = 2|PB|²s² (cross term 2xᵀPBe split via
/// 2ab ≤ a²/2 + 2b²). Throws NotHurwitz if A+BK is not Hurwitz.
struct IssCertificate {
  Eigen::MatrixXd P;
  KinfFn alpha;
  KinfFn gamma;
};

IssCertificate quadratic_iss_certificate(const LinearPlant& plant);

/// Solves AᵀP + PA = −Q for symmetric positive-definite Q (dense Kronecker
/// route; A must be Hurwitz for a positive-definite solution).
Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a,
                                          const Eigen::MatrixXd& q);

}  // namespace etclab
