#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "etclab/plant.hpp"

namespace etclab {

/// Trigger form for the inter-event-time map ϑ of a linear plant under the
/// relative threshold rule on the sampling-induced state error
/// e(t) = x(t_j) − x(t):
///   kQuadratic: fire when |e|² ≥ σ|x|²  (σ on squared norms)
///   kLinear:    fire when |e|  ≥ σ|x|
/// The two conventions are linked by σ_quadratic = σ_linear².
enum class IetMode { kLinear, kQuadratic };

struct IetQuery {
  LinearPlant plant;
  double sigma = 0.1;       // in (0,1)
  IetMode mode = IetMode::kQuadratic;
  double delta_max = 5.0;   // root-scan horizon (s)
  double scan_step = 0.0;   // 0 → delta_max / 1e4
};

void validate(const IetQuery& q);

/// Root finder for ϑ(x) = min{δ > 0 | g(δ) = 0} with
///   g(δ) = xᵀM(δ)x,  M(δ) = (1−σ)GᵀG − (Gᵀ+G) + I   (quadratic mode)
///   g(δ) = |(I−G(δ))x| − σ|G(δ)x|                    (linear mode).
/// G(δ) is cached on the scan grid so that repeated queries on the same
/// plant are cheap. g(0) < 0 is asserted before every scan.
class IetSolver {
 public:
  explicit IetSolver(IetQuery query);

  /// First root of g, refined by bisection to 1e−10 s; nullopt when g has no
  /// sign change up to delta_max (the trigger never fires on this ray).
  /// Throws DegenerateState for x = 0.
  std::optional<double> theta(const Eigen::VectorXd& x) const;

  /// G(δ), bypassing the grid cache.
  Eigen::MatrixXd transition(double delta) const;

  const IetQuery& query() const { return query_; }

 private:
  double g_value(const Eigen::MatrixXd& g_matrix, const Eigen::VectorXd& x) const;

  IetQuery query_;
  std::vector<Eigen::MatrixXd> grid_;  // G at k·scan_step, k = 0..
};

/// One-shot ϑ evaluation (builds a solver internally).
std::optional<double> inter_event_time(const IetQuery& q,
                                       const Eigen::VectorXd& x);

/// true iff ϑ(c·x) agrees with ϑ(x) to 1e−8 for every scale factor, treating
/// NeverTriggers as a mismatch only when it differs across scales.
bool ray_invariance_check(const IetQuery& q, const Eigen::VectorXd& x,
                          const std::vector<double>& scales);

/// First-order approximation ϑ ≈ σ_l·|x| / |(A+BK)x| (linear-mode σ).
/// Throws SingularDirection when (A+BK)x = 0.
double taylor_iet_approx(const LinearPlant& plant, double sigma_l,
                         const Eigen::VectorXd& x);

/// Asymptotic sampling-pattern classes for planar closed loops.
enum class EigenClass { kRealDistinct, kRealRepeated, kComplexConjugate };

struct PlanarPrediction {
  EigenClass eigen_class = EigenClass::kRealDistinct;
  // RealDistinct: {σ/|λ₁|, σ/|λ₂|} — generic attractor first, then the
  // eigendirection-initial case. RealRepeated: one constant σ/|λ|.
  std::vector<double> candidate_iets;
  double period = 0.0;  // π/β for the complex-conjugate class (s)
  double lambda_re = 0.0;
  double beta = 0.0;    // imaginary part (complex class)
};

/// Classifies a planar Hurwitz closed loop by the eigenvalues of A+BK and
/// reports the limit inter-event-time candidates of the relative rule with
/// linear-mode threshold σ_l. Throws Unsupported for n ≠ 2 or non-Hurwitz.
PlanarPrediction classify_planar(const LinearPlant& plant, double sigma_l);

/// Angle map Ψ(φ) = arg(G(ϑ(φ))·[cos φ, sin φ]ᵀ) reduced to [0, π).
/// nullopt when ϑ does not exist on that ray.
std::optional<double> angle_map(const IetSolver& solver, double phi);

struct FixedPoint {
  double phi = 0.0;
  double multiplier = 0.0;  // |dΨ/dφ| by central difference
  bool stable = false;      // multiplier < 1
};

struct FixedPointReport {
  bool identity_map = false;  // Ψ = id on the whole grid (continuum)
  std::vector<FixedPoint> points;
};

/// Scans Ψ(φ) − φ (mod π) on a uniform grid and refines sign changes by
/// bisection. An empty list is a valid outcome (e.g. pure rotation).
FixedPointReport find_fixed_points(const IetSolver& solver, int grid_count);

/// Conic finite-state abstraction of the sampling behavior for n = 2.
struct ConicRegion {
  int index = 0;
  double phi_lo = 0.0;
  double phi_hi = 0.0;
  double h_lo = 0.0;
  double h_hi = 0.0;
  bool unbounded = false;  // some sampled ray never triggers
};

struct ConicAbstraction {
  std::vector<ConicRegion> regions;
  std::vector<std::pair<int, int>> transitions;  // sorted (source, target)
  int rays_per_region = 0;
  int delta_samples = 0;
  bool empirical = true;  // bounds are sampled, not certified
};

/// Partitions [0, π) into n_regions equal sectors (antipodes identified),
/// samples ϑ on rays_per_region rays per sector, pads the per-region bounds
/// by 2% of the spread + 1e−6, and records transitions by propagating each
/// sampled ray through G(δ) for delta_samples values of δ within the bounds.
ConicAbstraction build_abstraction(const IetSolver& solver, int n_regions,
                                   int rays_per_region, int delta_samples);

/// Directed-graph text (Graphviz dot): one node per region labeled with its
/// bounds, one edge per transition, deterministic ordering.
std::string export_dot(const ConicAbstraction& abstraction);

/// Region table: s, phi_lo, phi_hi, h_lo, h_hi.
std::string regions_csv(const ConicAbstraction& abstraction);

/// Sector index of an angle under the abstraction's partition of [0, π).
int sector_of(double phi, int n_regions);

}  // namespace etclab
