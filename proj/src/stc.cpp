#include "etclab/stc.hpp"

#include <cmath>

#include "etclab/errors.hpp"
#include "etclab/matrix_exp.hpp"

namespace etclab {

void validate(const CandidateGrid& grid, double zeno_floor) {
  if (grid.deltas.empty()) {
    throw ConfigError("CandidateGrid: at least one candidate required");
  }
  if (grid.deltas.front() < zeno_floor) {
    throw ConfigError("CandidateGrid: first candidate below zeno floor");
  }
  for (std::size_t i = 1; i < grid.deltas.size(); ++i) {
    if (!(grid.deltas[i] > grid.deltas[i - 1])) {
      throw ConfigError("CandidateGrid: candidates must be strictly increasing");
    }
  }
}

CandidateGrid make_grid(double lo, double hi, int count, GridSpacing spacing) {
  if (!(lo > 0.0 && hi > lo) || count < 1) {
    throw ConfigError("make_grid: need 0 < lo < hi and count >= 1");
  }
  CandidateGrid grid;
  grid.deltas.reserve(count);
  if (count == 1) {
    grid.deltas.push_back(hi);
    return grid;
  }
  for (int i = 0; i < count; ++i) {
    const double frac = static_cast<double>(i) / (count - 1);
    if (spacing == GridSpacing::kLog) {
      grid.deltas.push_back(lo * std::pow(hi / lo, frac));
    } else {
      grid.deltas.push_back(lo + frac * (hi - lo));
    }
  }
  return grid;
}

namespace {

// Triggering condition of the relative rule evaluated at offset delta.
bool triggered_at(const LinearPlant& plant, double sigma,
                  const Eigen::VectorXd& x, double delta, IetMode norm_mode) {
  const Eigen::MatrixXd g = transition_matrix(plant, delta);
  const Eigen::VectorXd gx = g * x;
  const double err = (plant.K * (x - gx)).norm();
  const double state = gx.norm();
  if (norm_mode == IetMode::kQuadratic) {
    return err * err >= sigma * state * state;
  }
  return err >= sigma * state;
}

}  // namespace

double next_sample_relative(const LinearPlant& plant, double sigma,
                            const Eigen::VectorXd& x, const CandidateGrid& grid,
                            IetMode norm_mode) {
  validate(plant);
  validate(grid);
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw ConfigError("next_sample_relative: sigma must lie in (0,1)");
  }
  if (!(x.norm() > 0.0)) {
    throw DegenerateState("next_sample_relative: x = 0");
  }
  // The condition is homogeneous in x; normalize for conditioning.
  const Eigen::VectorXd dir = x / x.norm();

  if (triggered_at(plant, sigma, dir, grid.deltas.front(), norm_mode)) {
    throw NoValidCandidate(
        "next_sample_relative: condition holds at the smallest candidate");
  }
  double chosen = grid.deltas.front();
  for (std::size_t i = 1; i < grid.deltas.size(); ++i) {
    if (triggered_at(plant, sigma, dir, grid.deltas[i], norm_mode)) break;
    chosen = grid.deltas[i];
  }
  return chosen;
}

bool validate_lower_bound(const LinearPlant& plant, double sigma,
                          const Eigen::VectorXd& x, double delta,
                          IetMode norm_mode) {
  if (!(delta > 0.0)) {
    throw ConfigError("validate_lower_bound: delta must be positive");
  }
  IetQuery q;
  q.plant = plant;
  q.sigma = sigma;
  q.mode = norm_mode;
  q.delta_max = std::max(2.0 * delta, 1.0);
  const auto theta = inter_event_time(q, x);
  if (!theta) return true;  // never triggers: any delta is a lower bound
  return delta <= *theta + 1e-9;
}

}  // namespace etclab
