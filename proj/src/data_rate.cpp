#include "etclab/data_rate.hpp"

#include <algorithm>
#include <cmath>

#include "etclab/errors.hpp"
#include "etclab/rng.hpp"

namespace etclab {

double ttc_min_rate(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || !a.allFinite()) {
    throw ConfigError("ttc_min_rate: A must be square and finite");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("ttc_min_rate: eigensolver failed");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double re = es.eigenvalues()(i).real();
    if (re > 0.0) sum += re;
  }
  return sum / std::log(2.0);
}

double etc_rate_lower_bound(double a, double psi, double nu, double rho0,
                            double delta_bar) {
  if (!(nu > 1.0) || !(rho0 > 0.0 && rho0 < 1.0) || !(delta_bar > 0.0) ||
      !(psi >= 0.0)) {
    throw ConfigError("etc_rate_lower_bound: parameter out of range");
  }
  const double arg = (std::exp(a * delta_bar) - 1.0) /
                     (rho0 * std::exp(-psi * delta_bar));
  if (arg <= 1.0) return 0.0;  // the max{0,·} clamp
  const double denom =
      std::log(nu) + std::log(2.0 + std::exp(psi * delta_bar) / rho0);
  return (a + psi) / denom * std::log2(arg);
}

double breakeven_delay(double a, double nu, double rho0) {
  if (!(a > 0.0)) {
    throw Unsupported("breakeven_delay: requires A > 0");
  }
  if (!(nu > 1.0) || !(rho0 > 0.0 && rho0 < 1.0)) {
    throw ConfigError("breakeven_delay: parameter out of range");
  }
  return std::log(1.0 + nu * (2.0 * rho0 + 1.0)) / a;
}

void validate(const ChannelSpec& ch) {
  if (!(ch.delta_bar >= 0.0) || !(ch.nu > 1.0) ||
      !(ch.rho0 > 0.0 && ch.rho0 < 1.0) || !(ch.psi >= 0.0) ||
      !(ch.v0 > 0.0)) {
    throw ConfigError("ChannelSpec: parameter out of range");
  }
  if (!(ch.rho0 * std::exp(-ch.psi * ch.delta_bar) < 1.0)) {
    throw ConfigError("ChannelSpec: contraction margin violated");
  }
}

RateReport simulate_scalar_channel(double a, double b, double k,
                                   const ChannelSpec& ch,
                                   const DelayDraw& delay, double horizon,
                                   double z0, std::uint64_t seed) {
  validate(ch);
  if (!(horizon > 0.0)) {
    throw ConfigError("simulate_scalar_channel: horizon must be positive");
  }
  if (delay.kind == DelayKind::kConstant &&
      !(delay.value >= 0.0 && delay.value <= ch.delta_bar)) {
    throw ConfigError("simulate_scalar_channel: constant delay outside [0, delta_bar]");
  }
  if (!(a + b * k < 0.0)) {
    throw ConfigError(
        "simulate_scalar_channel: closed loop with continuous feedback must be stable");
  }

  // Quantizer feasibility: ⌈ν⌉ uniform cells over the reachable interval
  // [v(t_c), v(t_c)·e^{(A+ψ)Δ̄}] must leave a half-cell residual no larger
  // than the contraction target ρ₀e^{−ψΔ̄}v(t_s) in the worst case t_s = t_c.
  const double cells = std::ceil(ch.nu);
  const double required = std::exp(ch.psi * ch.delta_bar) *
                          std::abs(std::exp((a + ch.psi) * ch.delta_bar) - 1.0) /
                          (2.0 * ch.rho0);
  if (cells < required) {
    throw QuantizerTooCoarse(
        "simulate_scalar_channel: need ceil(nu) >= " + std::to_string(required));
  }
  const long long bits_per_event =
      static_cast<long long>(std::ceil(std::log2(cells))) + 1;

  CounterRng rng(substream_seed(seed, 0));
  const auto draw_delay = [&]() {
    switch (delay.kind) {
      case DelayKind::kZero:
        return 0.0;
      case DelayKind::kConstant:
        return delay.value;
      case DelayKind::kUniform:
      default:
        return rng.next_uniform(0.0, ch.delta_bar);
    }
  };
  const auto threshold = [&](double t) { return ch.v0 * std::exp(-ch.psi * t); };

  RateReport report;
  report.horizon = horizon;
  report.r_ttc = ttc_min_rate(Eigen::MatrixXd::Constant(1, 1, a));
  report.r_etc_bound = ch.delta_bar > 0.0
                           ? etc_rate_lower_bound(a, ch.psi, ch.nu, ch.rho0,
                                                  ch.delta_bar)
                           : 0.0;

  double t = 0.0;
  double z = z0;
  while (true) {
    // Next send instant: |z|e^{A(t_s − t)} = v₀e^{−ψ t_s}.
    if (z == 0.0) break;  // error identically zero: never triggers
    double t_send;
    double z_abs_send;
    if (std::abs(z) >= threshold(t)) {
      t_send = t;
      z_abs_send = std::abs(z);
    } else {
      if (a + ch.psi <= 0.0) break;  // error decays faster than the threshold
      t_send = (std::log(ch.v0 / std::abs(z)) + a * t) / (a + ch.psi);
      z_abs_send = threshold(t_send);  // crossing hits the threshold exactly
    }
    if (t_send > horizon) break;

    const double v_send = threshold(t_send);
    const double d = draw_delay();
    const double t_recv = t_send + d;
    const double sign = z < 0.0 ? -1.0 : 1.0;
    const double z_abs_recv = z_abs_send * std::exp(a * d);

    report.send_times.push_back(t_send);
    report.reception_times.push_back(t_recv);
    report.bits += bits_per_event;
    report.events += 1;
    report.max_growth_ratio =
        std::max(report.max_growth_ratio,
                 z_abs_recv / (std::exp(a * ch.delta_bar) * v_send));

    // Quantized correction: the estimator jump leaves the certified residual.
    const double bound = ch.rho0 * std::exp(-ch.psi * ch.delta_bar) * v_send;
    z = sign * bound;
    report.max_contraction_ratio =
        std::max(report.max_contraction_ratio, std::abs(z) / bound);
    t = t_recv;
    if (t > horizon) break;
  }

  report.empirical_rate = static_cast<double>(report.bits) / horizon;
  return report;
}

}  // namespace etclab
