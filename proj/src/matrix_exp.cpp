#include "etclab/matrix_exp.hpp"

#include <cmath>

#include "etclab/errors.hpp"

namespace etclab {

namespace {

// Degree-13 Padé coefficients (Higham, "The scaling and squaring method for
// the matrix exponential revisited").
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

// Scaling threshold θ₁₃ for the degree-13 approximant.
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  using Eigen::MatrixXd;
  const auto n = m.rows();
  if (n != m.cols()) {
    throw ConfigError("matrix_exponential: matrix must be square");
  }
  if (!m.allFinite()) {
    throw NumericalOverflow("matrix_exponential: non-finite input");
  }

  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int squarings = 0;
  if (norm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  }
  const MatrixXd a = m / std::ldexp(1.0, squarings);

  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a2 * a4;
  const MatrixXd ident = MatrixXd::Identity(n, n);

  const MatrixXd u =
      a * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
           kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 +
           kPade13[1] * ident);
  const MatrixXd v =
      a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
      kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 + kPade13[0] * ident;

  MatrixXd result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  if (!result.allFinite()) {
    throw NumericalOverflow("matrix_exponential: non-finite result");
  }
  return result;
}

Eigen::MatrixXd transition_matrix(const LinearPlant& plant, double delta) {
  if (delta < 0.0) {
    throw ConfigError("transition_matrix: delta must be nonnegative");
  }
  const int n = plant.state_dim();
  Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  augmented.topLeftCorner(n, n) = plant.A;
  augmented.topRightCorner(n, n) = plant.B * plant.K;
  const Eigen::MatrixXd e = matrix_exponential(augmented * delta);
  Eigen::MatrixXd g = e.topLeftCorner(n, n) + e.topRightCorner(n, n);
  if (!g.allFinite()) {
    throw NumericalOverflow("transition_matrix: non-finite result");
  }
  return g;
}

}  // namespace etclab
