#pragma once

#include <Eigen/Dense>
#include <vector>

#include "etclab/plant.hpp"
#include "etclab/trigger.hpp"

namespace etclab {

struct SimConfig {
  double step = 1e-3;             // fixed integration step (s)
  double event_tolerance = 1e-9;  // bisection width for event localization (s)
  double zeno_floor = 1e-7;       // minimum admissible inter-event time (s)
  double horizon = 10.0;          // final time (s)
};

/// Throws ConfigError unless 0 < event_tolerance < step < horizon and
/// zeno_floor > 0.
void validate(const SimConfig& cfg);

/// Dense closed-loop record: state, held input and sampling-induced error
/// e(t) = û(t) − κ(x(t)) at strictly increasing times. Rows at event instants
/// hold post-jump values, so the error columns are exactly zero there.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<Eigen::VectorXd> errors;
  std::vector<double> eta;  // dynamic-rule internal variable (0 otherwise)
};

/// Sampling instants t_j (t_0 = 0) with the trigger value observed at each.
struct EventLog {
  std::vector<double> times;
  std::vector<double> trigger_values;

  /// h_j = t_{j+1} − t_j.
  std::vector<double> inter_event_times() const;
};

struct SimResult {
  Trajectory trajectory;
  EventLog events;
  TriggerState final_trigger_state;
};

/// Sample-and-hold closed-loop simulation of ẋ = f(x, û), û = κ(x(t_j)).
///
/// Flows are integrated with a fixed-step classical Runge–Kutta scheme; a
/// cubic Hermite interpolant over each step provides dense output for
/// localizing trigger crossings by bisection to within event_tolerance.
/// At each event the held input is refreshed, the error resets to zero and
/// the rule's jump update runs. t = 0 counts as the first event.
///
/// Throws ZenoDetected when two events are closer than zeno_floor and
/// NumericalOverflow when the state leaves the representable range.
SimResult simulate(const VectorField& plant, const TriggerRule& rule,
                   const Eigen::VectorXd& x0, const SimConfig& cfg);

}  // namespace etclab
