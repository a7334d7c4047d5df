#include "etclab/sampling_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "etclab/errors.hpp"
#include "etclab/matrix_exp.hpp"

namespace etclab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBisectTol = 1e-10;

// Angle of a planar vector reduced to [0, π) (antipodes identified).
double half_angle(const Eigen::Vector2d& v) {
  double a = std::fmod(std::atan2(v.y(), v.x()), kPi);
  if (a < 0.0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

// Signed angular difference folded into [−π/2, π/2).
double fold_half(double diff) {
  double w = std::fmod(diff + kPi / 2.0, kPi);
  if (w < 0.0) w += kPi;
  return w - kPi / 2.0;
}

std::string label_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void validate(const IetQuery& q) {
  validate(q.plant);
  if (!(q.sigma > 0.0 && q.sigma < 1.0)) {
    throw ConfigError("IetQuery: sigma must lie in (0,1)");
  }
  if (!(q.delta_max > 0.0)) {
    throw ConfigError("IetQuery: delta_max must be positive");
  }
  if (q.scan_step < 0.0 || q.scan_step >= q.delta_max) {
    throw ConfigError("IetQuery: need 0 <= scan_step < delta_max");
  }
}

IetSolver::IetSolver(IetQuery query) : query_(std::move(query)) {
  validate(query_);
  if (query_.scan_step == 0.0) query_.scan_step = query_.delta_max / 1e4;
  const int count = static_cast<int>(std::ceil(query_.delta_max / query_.scan_step));
  grid_.reserve(count + 1);
  for (int k = 0; k <= count; ++k) {
    const double delta = std::min(k * query_.scan_step, query_.delta_max);
    grid_.push_back(transition_matrix(query_.plant, delta));
  }
}

Eigen::MatrixXd IetSolver::transition(double delta) const {
  return transition_matrix(query_.plant, delta);
}

double IetSolver::g_value(const Eigen::MatrixXd& g_matrix,
                          const Eigen::VectorXd& x) const {
  const Eigen::VectorXd gx = g_matrix * x;
  if (query_.mode == IetMode::kQuadratic) {
    // xᵀM(δ)x with M = (1−σ)GᵀG − (Gᵀ+G) + I.
    return (1.0 - query_.sigma) * gx.squaredNorm() - 2.0 * x.dot(gx) +
           x.squaredNorm();
  }
  return (x - gx).norm() - query_.sigma * gx.norm();
}

std::optional<double> IetSolver::theta(const Eigen::VectorXd& x) const {
  const double xn = x.norm();
  if (!(xn > 0.0)) {
    throw DegenerateState("inter_event_time: x = 0");
  }
  const Eigen::VectorXd dir = x / xn;  // ϑ is constant along rays

  const double g0 = g_value(grid_[0], dir);
  if (!(g0 < 0.0)) {
    throw NumericalFailure("inter_event_time: g(0) not negative");
  }

  for (std::size_t k = 1; k < grid_.size(); ++k) {
    if (g_value(grid_[k], dir) >= 0.0) {
      double lo = (k - 1) * query_.scan_step;
      double hi = std::min(k * query_.scan_step, query_.delta_max);
      while (hi - lo > kBisectTol) {
        const double mid = 0.5 * (lo + hi);
        if (g_value(transition(mid), dir) >= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::nullopt;
}

std::optional<double> inter_event_time(const IetQuery& q,
                                       const Eigen::VectorXd& x) {
  return IetSolver(q).theta(x);
}

bool ray_invariance_check(const IetQuery& q, const Eigen::VectorXd& x,
                          const std::vector<double>& scales) {
  IetSolver solver(q);
  const auto base = solver.theta(x);
  for (double c : scales) {
    const auto scaled = solver.theta(c * x);
    if (base.has_value() != scaled.has_value()) return false;
    if (base && std::abs(*base - *scaled) > 1e-8) return false;
  }
  return true;
}

double taylor_iet_approx(const LinearPlant& plant, double sigma_l,
                         const Eigen::VectorXd& x) {
  validate(plant);
  const Eigen::MatrixXd acl = plant.closed_loop();
  const double denom = (acl * x).norm();
  if (denom <= 1e-12 * std::max(1.0, acl.norm()) * x.norm()) {
    throw SingularDirection("taylor_iet_approx: (A+BK)x = 0");
  }
  return sigma_l * x.norm() / denom;
}

PlanarPrediction classify_planar(const LinearPlant& plant, double sigma_l) {
  validate(plant);
  if (plant.state_dim() != 2) {
    throw Unsupported("classify_planar: requires a planar plant (n = 2)");
  }
  const Eigen::Matrix2d acl = plant.closed_loop();
  Eigen::EigenSolver<Eigen::Matrix2d> es(acl);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("classify_planar: eigensolver failed");
  }
  const auto ev = es.eigenvalues();
  if (!(ev.real().array() < 0.0).all()) {
    throw Unsupported("classify_planar: A + BK is not Hurwitz");
  }

  PlanarPrediction pred;
  const double scale = std::max(1.0, acl.norm());
  if (std::abs(ev(0).imag()) > 1e-9 * scale) {
    pred.eigen_class = EigenClass::kComplexConjugate;
    pred.lambda_re = ev(0).real();
    pred.beta = std::abs(ev(0).imag());
    pred.period = kPi / pred.beta;
    return pred;
  }

  double l1 = ev(0).real();
  double l2 = ev(1).real();
  if (l1 < l2) std::swap(l1, l2);  // l1 is the slow eigenvalue
  pred.lambda_re = l1;
  if (std::abs(l1 - l2) <= 1e-9 * scale &&
      (acl - l1 * Eigen::Matrix2d::Identity()).norm() <= 1e-9 * scale) {
    // Geometric multiplicity 2: the flow is radial, ϑ is constant.
    pred.eigen_class = EigenClass::kRealRepeated;
    pred.candidate_iets = {sigma_l / std::abs(l1)};
    return pred;
  }
  pred.eigen_class = EigenClass::kRealDistinct;
  pred.candidate_iets = {sigma_l / std::abs(l1), sigma_l / std::abs(l2)};
  return pred;
}

std::optional<double> angle_map(const IetSolver& solver, double phi) {
  if (solver.query().plant.state_dim() != 2) {
    throw Unsupported("angle_map: requires a planar plant");
  }
  Eigen::VectorXd dir(2);
  dir << std::cos(phi), std::sin(phi);
  const auto theta = solver.theta(dir);
  if (!theta) return std::nullopt;
  const Eigen::Vector2d v = solver.transition(*theta) * dir;
  if (v.norm() < 1e-300) return std::nullopt;
  return half_angle(v);
}

FixedPointReport find_fixed_points(const IetSolver& solver, int grid_count) {
  if (grid_count < 2) {
    throw ConfigError("find_fixed_points: grid_count must be >= 2");
  }
  FixedPointReport report;

  const auto displacement = [&](double phi) -> std::optional<double> {
    const auto psi = angle_map(solver, phi);
    if (!psi) return std::nullopt;
    return fold_half(*psi - phi);
  };

  std::vector<std::optional<double>> d(grid_count);
  bool all_identity = true;
  for (int k = 0; k < grid_count; ++k) {
    d[k] = displacement(k * kPi / grid_count);
    if (!d[k] || std::abs(*d[k]) >= 1e-9) all_identity = false;
  }
  if (all_identity) {
    report.identity_map = true;
    return report;
  }

  const auto push_fixed_point = [&](double phi_star) {
    const double h = 1e-5;
    const auto psi_plus = angle_map(solver, phi_star + h);
    const auto psi_minus = angle_map(solver, phi_star - h);
    FixedPoint fp;
    fp.phi = phi_star;
    if (psi_plus && psi_minus) {
      fp.multiplier = std::abs(fold_half(*psi_plus - *psi_minus)) / (2.0 * h);
    }
    fp.stable = fp.multiplier < 1.0;
    report.points.push_back(fp);
  };

  for (int k = 0; k < grid_count; ++k) {
    const int next = (k + 1) % grid_count;
    if (!d[k] || !d[next]) continue;
    const double dk = *d[k];
    const double dn = *d[next];
    const double phi_k = k * kPi / grid_count;
    const double phi_n = (k + 1) * kPi / grid_count;  // == π when wrapping
    if (std::abs(dk) < 1e-12) {
      push_fixed_point(phi_k);
      continue;
    }
    // Require a genuine sign change; large jumps come from branch folding.
    if (dk * dn < 0.0 && std::abs(dk - dn) < kPi / 2.0) {
      double lo = phi_k;
      double hi = phi_n;
      while (hi - lo > kBisectTol) {
        const double mid = 0.5 * (lo + hi);
        const auto dm = displacement(mid);
        if (!dm) break;
        if ((*dm > 0.0) == (dk > 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      push_fixed_point(0.5 * (lo + hi));
    }
  }
  return report;
}

int sector_of(double phi, int n_regions) {
  double a = std::fmod(phi, kPi);
  if (a < 0.0) a += kPi;
  const int idx = static_cast<int>(a / kPi * n_regions);
  return std::min(idx, n_regions - 1);
}

ConicAbstraction build_abstraction(const IetSolver& solver, int n_regions,
                                   int rays_per_region, int delta_samples) {
  if (solver.query().plant.state_dim() != 2) {
    throw Unsupported("build_abstraction: requires a planar plant");
  }
  if (n_regions < 1 || rays_per_region < 1 || delta_samples < 1) {
    throw ConfigError("build_abstraction: counts must be >= 1");
  }

  ConicAbstraction abs;
  abs.rays_per_region = rays_per_region;
  abs.delta_samples = delta_samples;
  const double width = kPi / n_regions;

  std::set<std::pair<int, int>> transitions;
  for (int s = 0; s < n_regions; ++s) {
    ConicRegion region;
    region.index = s;
    region.phi_lo = s * width;
    region.phi_hi = (s + 1) * width;

    std::vector<double> ray_phis;
    std::vector<double> thetas;
    bool never = false;
    for (int i = 0; i < rays_per_region; ++i) {
      // Endpoints included (slightly inset so the last ray stays in this
      // sector); boundary values of θ dominate the per-region extremes.
      const double phi =
          rays_per_region == 1
              ? region.phi_lo + 0.5 * width
              : region.phi_lo +
                    i * (width * (1.0 - 1e-9)) / (rays_per_region - 1);
      Eigen::VectorXd dir(2);
      dir << std::cos(phi), std::sin(phi);
      const auto theta = solver.theta(dir);
      if (!theta) {
        never = true;
        continue;
      }
      ray_phis.push_back(phi);
      thetas.push_back(*theta);
    }

    if (thetas.empty()) {
      region.unbounded = true;
      region.h_lo = 0.0;
      region.h_hi = std::numeric_limits<double>::infinity();
    } else {
      const auto [lo_it, hi_it] = std::minmax_element(thetas.begin(), thetas.end());
      const double margin = 0.02 * (*hi_it - *lo_it) + 1e-6;
      region.h_lo = std::max(0.0, *lo_it - margin);
      region.h_hi = *hi_it + margin;
      if (never) {
        region.unbounded = true;
        region.h_hi = std::numeric_limits<double>::infinity();
      }
    }

    if (!region.unbounded) {
      for (std::size_t i = 0; i < ray_phis.size(); ++i) {
        Eigen::VectorXd dir(2);
        dir << std::cos(ray_phis[i]), std::sin(ray_phis[i]);
        for (int k = 0; k < delta_samples; ++k) {
          const double frac =
              delta_samples == 1 ? 0.5 : static_cast<double>(k) / (delta_samples - 1);
          const double delta = region.h_lo + frac * (region.h_hi - region.h_lo);
          const Eigen::Vector2d v = solver.transition(delta) * dir;
          if (v.norm() < 1e-300) continue;
          transitions.emplace(s, sector_of(half_angle(v), n_regions));
        }
      }
    }
    abs.regions.push_back(region);
  }
  abs.transitions.assign(transitions.begin(), transitions.end());
  return abs;
}

std::string export_dot(const ConicAbstraction& abstraction) {
  std::string out = "digraph sampling_abstraction {\n";
  out += "  // inter-event-time bounds sampled on " +
         std::to_string(abstraction.rays_per_region) +
         " rays/region; empirical, not certified\n";
  out += "  graph [empirical=true];\n";
  for (const auto& region : abstraction.regions) {
    out += "  R" + std::to_string(region.index) + " [label=\"R_" +
           std::to_string(region.index);
    if (region.unbounded) {
      out += " [unbounded]\"];\n";
    } else {
      out += " [" + label_double(region.h_lo) + ", " +
             label_double(region.h_hi) + "]\"];\n";
    }
  }
  for (const auto& [src, dst] : abstraction.transitions) {
    out += "  R" + std::to_string(src) + " -> R" + std::to_string(dst) + ";\n";
  }
  out += "}\n";
  return out;
}

std::string regions_csv(const ConicAbstraction& abstraction) {
  std::string out = "s,phi_lo,phi_hi,h_lo,h_hi\n";
  char buf[160];
  for (const auto& r : abstraction.regions) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g\n", r.index,
                  r.phi_lo, r.phi_hi, r.h_lo, r.h_hi);
    out += buf;
  }
  return out;
}

}  // namespace etclab
