#include "etclab/simulate.hpp"

#include <cmath>
#include <limits>

#include "etclab/errors.hpp"

namespace etclab {

void validate(const SimConfig& cfg) {
  if (!(cfg.event_tolerance > 0.0 && cfg.event_tolerance < cfg.step &&
        cfg.step < cfg.horizon)) {
    throw ConfigError("SimConfig: need 0 < event_tolerance < step < horizon");
  }
  if (!(cfg.zeno_floor > 0.0)) {
    throw ConfigError("SimConfig: zeno_floor must be positive");
  }
}

std::vector<double> EventLog::inter_event_times() const {
  std::vector<double> h;
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    h.push_back(times[j + 1] - times[j]);
  }
  return h;
}

namespace {

using Eigen::VectorXd;

// Cubic Hermite interpolant over one integration step.
struct StepInterpolant {
  double t0 = 0.0;
  double dt = 0.0;
  VectorXd x0, f0, x1, f1;

  VectorXd at(double t) const {
    const double s = (t - t0) / dt;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * x0 + ((s3 - 2.0 * s2 + s) * dt) * f0 +
           (-2.0 * s3 + 3.0 * s2) * x1 + ((s3 - s2) * dt) * f1;
  }
};

VectorXd rk4_step(const VectorField& plant, const VectorXd& x,
                  const VectorXd& u_held, const VectorXd& k1, double dt) {
  const VectorXd k2 = plant.f(x + 0.5 * dt * k1, u_held);
  const VectorXd k3 = plant.f(x + 0.5 * dt * k2, u_held);
  const VectorXd k4 = plant.f(x + dt * k3, u_held);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double lyapunov_expiry(const TriggerRule& rule, const TriggerState& st) {
  if (const auto* lyap = std::get_if<LyapunovDecreaseRule>(&rule)) {
    return st.t_event + 1.0 / lyap->sigma;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

SimResult simulate(const VectorField& plant, const TriggerRule& rule,
                   const Eigen::VectorXd& x0, const SimConfig& cfg) {
  validate(cfg);
  validate(rule);
  if (!x0.allFinite() || x0.size() != plant.state_dim) {
    throw ConfigError("simulate: x0 has wrong size or non-finite entries");
  }

  SimResult result;
  Trajectory& traj = result.trajectory;
  EventLog& events = result.events;

  double t = 0.0;
  VectorXd x = x0;
  VectorXd u_held = plant.kappa(x);
  VectorXd e = VectorXd::Zero(plant.input_dim);
  TriggerState st = make_trigger_state(rule, x, t);

  const auto record = [&](double rt, const VectorXd& rx, const VectorXd& ru,
                          const VectorXd& re) {
    traj.times.push_back(rt);
    traj.states.push_back(rx);
    traj.inputs.push_back(ru);
    traj.errors.push_back(re);
    traj.eta.push_back(st.eta);
  };

  // t = 0 is an event by convention.
  events.times.push_back(0.0);
  events.trigger_values.push_back(evaluate(rule, st, x, e, t));
  record(t, x, u_held, e);

  // Probes the trigger value at time tau inside the current step.
  const auto probe = [&](const StepInterpolant& interp, double tau,
                         VectorXd* x_out, VectorXd* e_out,
                         TriggerState* st_out) {
    VectorXd xt = interp.at(tau);
    VectorXd et = u_held - plant.kappa(xt);
    TriggerState stt =
        tau > interp.t0 ? flow_update(rule, st, xt, et, tau - interp.t0) : st;
    const double value = evaluate(rule, stt, xt, et, tau);
    if (x_out) *x_out = std::move(xt);
    if (e_out) *e_out = std::move(et);
    if (st_out) *st_out = std::move(stt);
    return value;
  };

  VectorXd f_start = plant.f(x, u_held);
  while (t < cfg.horizon - 1e-15) {
    const double expiry = lyapunov_expiry(rule, st);
    // Keep probes strictly inside the admissible threshold window.
    const double t_cap = std::min(cfg.horizon, expiry - cfg.event_tolerance);
    double dt = std::min(cfg.step, t_cap - t);
    bool forced_expiry = false;
    if (dt <= 0.0) {
      // Only reachable when V stayed at zero for a full threshold window.
      forced_expiry = true;
    }

    if (!forced_expiry) {
      StepInterpolant interp;
      interp.t0 = t;
      interp.dt = dt;
      interp.x0 = x;
      interp.f0 = f_start;
      interp.x1 = rk4_step(plant, x, u_held, f_start, dt);
      interp.f1 = plant.f(interp.x1, u_held);
      if (!interp.x1.allFinite()) {
        throw NumericalOverflow("simulate: state diverged at t = " +
                                std::to_string(t));
      }

      const double t1 = t + dt;
      VectorXd x1, e1;
      TriggerState st1;
      const double value1 = probe(interp, t1, &x1, &e1, &st1);

      if (value1 > 0.0) {
        // Sign change inside (t, t1]: bisect down to event_tolerance.
        double lo = t;
        double hi = t1;
        while (hi - lo > cfg.event_tolerance) {
          const double mid = 0.5 * (lo + hi);
          if (probe(interp, mid, nullptr, nullptr, nullptr) > 0.0) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        VectorXd x_ev, e_ev;
        TriggerState st_ev;
        const double value_ev = probe(interp, hi, &x_ev, &e_ev, &st_ev);

        const double h = hi - events.times.back();
        if (h < cfg.zeno_floor) {
          throw ZenoDetected(events.times.back(),
                             "simulate: inter-event time " + std::to_string(h) +
                                 " below zeno floor");
        }
        t = hi;
        x = std::move(x_ev);
        st = jump_update(rule, st_ev, x, t);
        u_held = plant.kappa(x);
        e = VectorXd::Zero(plant.input_dim);
        events.times.push_back(t);
        events.trigger_values.push_back(value_ev);
        record(t, x, u_held, e);
        f_start = plant.f(x, u_held);
        continue;
      }

      // No event in this step.
      t = t1;
      x = std::move(x1);
      e = std::move(e1);
      st = st1;
      f_start = interp.f1;
      record(t, x, u_held, e);
      if (t_cap == expiry - cfg.event_tolerance && t >= t_cap - 1e-15 &&
          expiry <= cfg.horizon) {
        forced_expiry = true;  // window exhausted without a sign change
      } else {
        continue;
      }
    }

    if (forced_expiry) {
      // Mandatory event when the decrease threshold reaches zero.
      const double t_ev = std::min(expiry, cfg.horizon);
      if (t_ev >= cfg.horizon) {
        break;
      }
      const double h = t_ev - events.times.back();
      if (h < cfg.zeno_floor) {
        throw ZenoDetected(events.times.back(),
                           "simulate: expiry event below zeno floor");
      }
      t = t_ev;
      st = jump_update(rule, st, x, t);
      u_held = plant.kappa(x);
      e = VectorXd::Zero(plant.input_dim);
      const auto* lyap = std::get_if<LyapunovDecreaseRule>(&rule);
      events.times.push_back(t);
      events.trigger_values.push_back(lyap ? x.dot(lyap->P * x) : 0.0);
      if (traj.times.back() < t) {
        record(t, x, u_held, e);
      }
      f_start = plant.f(x, u_held);
    }
  }

  result.final_trigger_state = st;
  return result;
}

}  // namespace etclab
