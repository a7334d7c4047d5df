#pragma once

#include <Eigen/Dense>

#include "etclab/plant.hpp"

namespace etclab {

/// Matrix exponential e^M by scaling-and-squaring with a degree-13 Padé
/// approximant. Throws NumericalOverflow if the result is not finite.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m);

/// Sampled-data transition operator
///   G(δ) = e^{Aδ} + ∫₀^δ e^{A(δ−τ)} BK dτ,
/// i.e. x(t_j + δ) = G(δ) x(t_j) while the input is held at K x(t_j).
/// Computed from one exponential of the augmented block matrix
/// [[A, BK], [0, 0]]: the upper-left block is e^{Aδ} and the upper-right
/// block is the integral term.
Eigen::MatrixXd transition_matrix(const LinearPlant& plant, double delta);

}  // namespace etclab
