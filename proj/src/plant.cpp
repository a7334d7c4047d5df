#include "etclab/plant.hpp"

#include <cmath>

#include "etclab/errors.hpp"

namespace etclab {

void validate(const LinearPlant& plant) {
  const auto n = plant.A.rows();
  const auto m = plant.B.cols();
  if (n < 1 || m < 1 || plant.A.cols() != n || plant.B.rows() != n ||
      plant.K.rows() != m || plant.K.cols() != n) {
    throw ConfigError("LinearPlant: inconsistent matrix dimensions");
  }
  if (!plant.A.allFinite() || !plant.B.allFinite() || !plant.K.allFinite()) {
    throw ConfigError("LinearPlant: non-finite entries");
  }
}

bool is_hurwitz(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("is_hurwitz: eigensolver failed");
  }
  return (es.eigenvalues().real().array() < 0.0).all();
}

VectorField make_vector_field(const LinearPlant& plant) {
  validate(plant);
  VectorField vf;
  vf.state_dim = plant.state_dim();
  vf.input_dim = plant.input_dim();
  vf.f = [A = plant.A, B = plant.B](const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& u) {
    return Eigen::VectorXd(A * x + B * u);
  };
  vf.kappa = [K = plant.K](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(K * x);
  };
  vf.linear = plant;
  return vf;
}

LinearPlant catalog_plant(const std::string& name) {
  if (name == "radial") {
    LinearPlant p;
    p.A = Eigen::Matrix2d::Zero();
    p.B = Eigen::Matrix2d::Identity();
    p.K = -Eigen::Matrix2d::Identity();
    return p;
  }
  if (name == "example") {
    // Oscillatory benchmark: closed-loop eigenvalues -1/2 ± (√3/2)i, so the
    // inter-event sequence is asymptotically periodic with period 2π/√3.
    LinearPlant p;
    p.A = Eigen::Matrix2d{{0.0, 1.0}, {-2.0, 3.0}};
    p.B = Eigen::Matrix2d{{0.0, 0.0}, {-1.0, 4.0}};
    p.K = -Eigen::Matrix2d::Identity();
    return p;
  }
  if (name == "scalar_unstable") {
    LinearPlant p;
    p.A = Eigen::MatrixXd::Constant(1, 1, 1.0);
    p.B = Eigen::MatrixXd::Constant(1, 1, 1.0);
    p.K = Eigen::MatrixXd::Constant(1, 1, -2.0);
    return p;
  }
  throw ConfigError("catalog_plant: unknown plant '" + name + "'");
}

VectorField catalog_vector_field(const std::string& name) {
  if (name == "pendulum") {
    VectorField vf;
    vf.state_dim = 2;
    vf.input_dim = 1;
    vf.f = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
      Eigen::VectorXd dx(2);
      dx[0] = x[1];
      dx[1] = std::sin(x[0]) + u[0];
      return dx;
    };
    vf.kappa = [](const Eigen::VectorXd& x) {
      Eigen::VectorXd u(1);
      u[0] = -2.0 * x[0] - 2.0 * x[1] - std::sin(x[0]);
      return u;
    };
    return vf;
  }
  return make_vector_field(catalog_plant(name));
}

std::vector<std::string> catalog_names() {
  return {"radial", "example", "scalar_unstable", "pendulum"};
}

}  // namespace etclab
