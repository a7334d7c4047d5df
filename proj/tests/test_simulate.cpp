#include <doctest.h>

#include <cmath>

#include "etclab/errors.hpp"
#include "etclab/matrix_exp.hpp"
#include "etclab/simulate.hpp"
#include "test_util.hpp"

using namespace etclab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

const TriggerRule kRelativeLinear025 =
    RelativeRule{KinfFn::identity(), KinfFn::identity(), 0.25};

}  // namespace

TEST_CASE("radial plant: every inter-event time is sigma/(1+sigma)") {
  // Flow from x_j is x(t) = x_j (1 - (t - t_j)), so |e| = d|x_j| and
  // |x| = (1-d)|x_j|: the linear relative rule fires at d = σ/(1+σ) = 0.2.
  const VectorField plant = catalog_vector_field("radial");
  SimConfig cfg;
  cfg.horizon = 2.0;
  const SimResult res = simulate(plant, kRelativeLinear025, vec2(2.0, 0.0), cfg);
  const auto h = res.events.inter_event_times();
  REQUIRE(h.size() >= 8);
  for (double v : h) CHECK(v == doctest::Approx(0.2).epsilon(1e-7));
}

TEST_CASE("equilibrium start produces no events after t_0") {
  const VectorField plant = catalog_vector_field("radial");
  SimConfig cfg;
  cfg.horizon = 1.0;
  const SimResult res = simulate(plant, kRelativeLinear025, vec2(0.0, 0.0), cfg);
  CHECK(res.events.times.size() == 1);
  for (const auto& x : res.trajectory.states) CHECK(x.norm() == 0.0);
}

TEST_CASE("disabled trigger reproduces the held-input flow G(t)x0") {
  const LinearPlant plant = catalog_plant("example");
  const TriggerRule disabled = AbsoluteRule{KinfFn::identity(), 1e300};
  SimConfig cfg;
  cfg.horizon = 5.0;
  const VectorXd x0 = vec2(1.0, -0.5);
  const SimResult res = simulate(make_vector_field(plant), disabled, x0, cfg);
  CHECK(res.events.times.size() == 1);
  for (std::size_t k = res.trajectory.times.size() / 2;
       k < res.trajectory.times.size(); k += 1000) {
    const double t = res.trajectory.times[k];
    const VectorXd expected = transition_matrix(plant, t) * x0;
    const double rel = (res.trajectory.states[k] - expected).norm() /
                       std::max(1.0, expected.norm());
    CHECK(rel < 1e-6);
  }
}

TEST_CASE("error resets to zero at every event") {
  const VectorField plant = catalog_vector_field("example");
  const TriggerRule rule =
      RelativeRule{KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.05};
  SimConfig cfg;
  cfg.horizon = 10.0;
  const SimResult res = simulate(plant, rule, vec2(2.0, 0.0), cfg);
  REQUIRE(res.events.times.size() > 10);
  // Event rows carry post-jump values.
  std::size_t row = 0;
  for (double tj : res.events.times) {
    while (row < res.trajectory.times.size() && res.trajectory.times[row] < tj) {
      ++row;
    }
    REQUIRE(row < res.trajectory.times.size());
    CHECK(res.trajectory.times[row] == tj);
    CHECK(res.trajectory.errors[row].norm() == 0.0);
  }
}

TEST_CASE("relative rule keeps the flow inside the threshold set") {
  const VectorField plant = catalog_vector_field("example");
  const TriggerRule rule =
      RelativeRule{KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.05};
  SimConfig cfg;
  cfg.horizon = 10.0;
  const SimResult res = simulate(plant, rule, vec2(2.0, 0.0), cfg);
  for (std::size_t k = 0; k < res.trajectory.times.size(); ++k) {
    const double en2 = res.trajectory.errors[k].squaredNorm();
    const double xn2 = res.trajectory.states[k].squaredNorm();
    CHECK(en2 <= 0.05 * xn2 + 1e-8);
  }
}

TEST_CASE("zeno guard fires for a vanishing absolute threshold") {
  const VectorField plant = catalog_vector_field("scalar_unstable");
  const TriggerRule rule = AbsoluteRule{KinfFn::identity(), 1e-12};
  SimConfig cfg;
  cfg.horizon = 1.0;
  CHECK_THROWS_AS(
      simulate(plant, rule, VectorXd::Constant(1, 1.0), cfg),
      ZenoDetected);
}

TEST_CASE("state divergence raises NumericalOverflow") {
  LinearPlant plant;
  plant.A = MatrixXd::Constant(1, 1, 200.0);
  plant.B = MatrixXd::Constant(1, 1, 1.0);
  plant.K = MatrixXd::Constant(1, 1, 0.0);
  const TriggerRule disabled = AbsoluteRule{KinfFn::identity(), 1e300};
  SimConfig cfg;
  cfg.horizon = 10.0;
  CHECK_THROWS_AS(
      simulate(make_vector_field(plant), disabled, VectorXd::Constant(1, 1.0), cfg),
      NumericalOverflow);
}

TEST_CASE("redesigned rule with delta_r = 0 matches relative bitwise") {
  const VectorField plant = catalog_vector_field("example");
  const TriggerRule relative =
      RelativeRule{KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.05};
  const TriggerRule redesigned = RedesignedRelativeRule{
      KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.05, 0.0};
  SimConfig cfg;
  cfg.horizon = 5.0;
  const auto a = simulate(plant, relative, vec2(2.0, 0.0), cfg);
  const auto b = simulate(plant, redesigned, vec2(2.0, 0.0), cfg);
  REQUIRE(a.events.times.size() == b.events.times.size());
  for (std::size_t j = 0; j < a.events.times.size(); ++j) {
    CHECK(a.events.times[j] == b.events.times[j]);
  }
}

TEST_CASE("mixed rule degenerates to absolute and relative") {
  const VectorField plant = catalog_vector_field("example");
  SimConfig cfg;
  cfg.horizon = 3.0;
  const VectorXd x0 = vec2(2.0, 0.0);

  const TriggerRule absolute = AbsoluteRule{KinfFn::quadratic(1.0), 0.05};
  const TriggerRule mixed_abs =
      MixedRule{KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.0, 0.05};
  const auto ea = simulate(plant, absolute, x0, cfg).events.times;
  const auto em = simulate(plant, mixed_abs, x0, cfg).events.times;
  REQUIRE(ea.size() == em.size());
  for (std::size_t j = 0; j < ea.size(); ++j) CHECK(ea[j] == em[j]);

  const TriggerRule relative =
      RelativeRule{KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.05};
  const TriggerRule mixed_rel =
      MixedRule{KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.05, 0.0};
  const auto er = simulate(plant, relative, x0, cfg).events.times;
  const auto em2 = simulate(plant, mixed_rel, x0, cfg).events.times;
  REQUIRE(er.size() == em2.size());
  for (std::size_t j = 0; j < er.size(); ++j) CHECK(er[j] == em2[j]);
}

TEST_CASE("lyapunov rule fires mandatorily at threshold expiry from rest") {
  LyapunovDecreaseRule rule;
  rule.P = MatrixXd::Identity(2, 2);
  rule.sigma = 0.5;  // expiry window 1/σ = 2 s
  const VectorField plant = catalog_vector_field("radial");
  SimConfig cfg;
  cfg.horizon = 5.0;
  const SimResult res = simulate(plant, TriggerRule(rule), vec2(0.0, 0.0), cfg);
  REQUIRE(res.events.times.size() == 3);  // t = 0, 2, 4
  CHECK(res.events.times[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(res.events.times[2] == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("nonlinear catalog plant simulates and stabilizes") {
  const VectorField plant = catalog_vector_field("pendulum");
  const TriggerRule rule =
      RelativeRule{KinfFn::identity(), KinfFn::identity(), 0.3};
  SimConfig cfg;
  cfg.horizon = 12.0;
  const SimResult res = simulate(plant, rule, vec2(1.0, 0.0), cfg);
  CHECK(res.events.times.size() > 5);
  CHECK(res.trajectory.states.back().norm() < 0.05);
}

TEST_CASE("trajectory times are strictly increasing") {
  const VectorField plant = catalog_vector_field("example");
  const TriggerRule rule =
      RelativeRule{KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.05};
  SimConfig cfg;
  cfg.horizon = 5.0;
  const SimResult res = simulate(plant, rule, vec2(2.0, 0.0), cfg);
  for (std::size_t k = 1; k < res.trajectory.times.size(); ++k) {
    CHECK(res.trajectory.times[k] > res.trajectory.times[k - 1]);
  }
}
