#pragma once

#include <Eigen/Dense>
#include <vector>

#include "etclab/plant.hpp"
#include "etclab/sampling_analysis.hpp"

namespace etclab {

/// Strictly increasing positive candidate sampling offsets δ₁ < … < δ_N.
struct CandidateGrid {
  std::vector<double> deltas;
};

/// Throws ConfigError unless the grid is nonempty, strictly increasing and
/// δ₁ ≥ zeno_floor.
void validate(const CandidateGrid& grid, double zeno_floor = 1e-7);

/// Builds a grid of `count` candidates between lo and hi, linearly or
/// logarithmically spaced.
enum class GridSpacing { kLinear, kLog };
CandidateGrid make_grid(double lo, double hi, int count, GridSpacing spacing);

/// Self-triggered choice of the next sampling offset for a linear plant
/// under the relative threshold rule: candidates are scanned in ascending
/// order, the triggering condition
///   γ(|K(I−G(δ))x|) ≥ σ·α(|G(δ)x|)
/// is evaluated exactly through the transition operator, and the last
/// candidate before the first triggered one is returned (equality counts as
/// triggered). This keeps the result a guaranteed lower bound on the
/// event-triggered inter-event time. norm_mode selects γ = α = identity
/// (kLinear) or γ = α = s² (kQuadratic).
///
/// Throws NoValidCandidate when the condition already holds at δ₁ and
/// DegenerateState for x = 0.
double next_sample_relative(const LinearPlant& plant, double sigma,
                            const Eigen::VectorXd& x, const CandidateGrid& grid,
                            IetMode norm_mode);

/// Cross-module consistency probe: true iff δ ≤ ϑ(x) (inclusive up to the
/// root-finder tolerance) where ϑ comes from the sampling-analysis map with
/// the matching mode; true as well when ϑ does not exist.
bool validate_lower_bound(const LinearPlant& plant, double sigma,
                          const Eigen::VectorXd& x, double delta,
                          IetMode norm_mode);

}  // namespace etclab
