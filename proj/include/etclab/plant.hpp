#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace etclab {

/// Linear plant ẋ = Ax + Bû with emulated state feedback u = Kx.
struct LinearPlant {
  Eigen::MatrixXd A;  // n×n
  Eigen::MatrixXd B;  // n×m
  Eigen::MatrixXd K;  // m×n

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }

  /// Closed-loop matrix A + BK.
  Eigen::MatrixXd closed_loop() const { return A + B * K; }
};

/// Checks dimensions and finiteness; throws ConfigError on violation.
void validate(const LinearPlant& plant);

/// true iff all eigenvalues of m have strictly negative real part.
bool is_hurwitz(const Eigen::MatrixXd& m);

/// General plant ẋ = f(x, û) with controller u = κ(x). Linear plants carry
/// their matrices along so that analysis code can reach G(δ).
struct VectorField {
  int state_dim = 0;
  int input_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> f;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> kappa;
  std::optional<LinearPlant> linear;
};

/// Wraps a linear plant as a vector field.
VectorField make_vector_field(const LinearPlant& plant);

/// Built-in plants addressable by name from experiment configs:
///   "radial"          A = 0, B = I₂, K = −I₂ (pure radial contraction)
///   "example"         the 2-D oscillatory benchmark system (see below)
///   "scalar_unstable" a = 1, b = 1, k = −2
///   "pendulum"        nonlinear: ẋ₁ = x₂, ẋ₂ = sin x₁ + u, κ = −2x₁ − 2x₂ − sin x₁
VectorField catalog_vector_field(const std::string& name);

/// Linear members of the catalog ("radial", "example", "scalar_unstable").
LinearPlant catalog_plant(const std::string& name);

/// Names accepted by catalog_vector_field, in a fixed order.
std::vector<std::string> catalog_names();

}  // namespace etclab
