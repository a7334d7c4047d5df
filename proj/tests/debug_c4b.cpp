// Estimator comparison for the example-system recurrence lag.
#include <cmath>
#include <cstdio>
#include <vector>

#include "etclab/plant.hpp"
#include "etclab/sampling_analysis.hpp"
#include "etclab/simulate.hpp"
#include "etclab/trigger.hpp"

using namespace etclab;
using Eigen::VectorXd;

int main() {
  const VectorField plant = catalog_vector_field("example");
  const TriggerRule rule =
      RelativeRule{KinfFn::quadratic(1.0), KinfFn::quadratic(1.0), 0.05};
  SimConfig cfg;
  cfg.horizon = 100.0;
  VectorXd x0(2);
  x0 << 2.0, 0.0;
  const SimResult res = simulate(plant, rule, x0, cfg);
  const auto h = res.events.inter_event_times();
  const auto& t = res.events.times;
  const int n = h.size();
  double hbar = 0;
  for (double v : h) hbar += v;
  hbar /= n;

  // Index-domain autocorrelation of the sequence h_j.
  std::printf("events=%d mean_h=%.5f\n", n, hbar);
  double best = -1e300;
  int bestL = 0;
  std::vector<double> r(61, 0.0);
  for (int L = 5; L <= 60; ++L) {
    double c = 0;
    int m = n - L;
    for (int j = 0; j < m; ++j) c += (h[j] - hbar) * (h[j + L] - hbar);
    c /= m;
    r[L] = c;
    if (c > best) { best = c; bestL = L; }
  }
  // parabolic refinement around bestL
  double refined = bestL;
  if (bestL > 5 && bestL < 60) {
    const double y0 = r[bestL - 1], y1 = r[bestL], y2 = r[bestL + 1];
    refined = bestL + 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2);
  }
  // mean elapsed time over bestL events
  double lag_time = 0;
  int m = n + 1 - bestL;
  for (int j = 0; j + bestL <= n; ++j) lag_time += t[j + bestL] - t[j];
  lag_time /= m;
  std::printf("index-ACF: L*=%d refined=%.2f lag_time(mean t_{j+L}-t_j)=%.4f  L*.hbar=%.4f refined.hbar=%.4f\n",
              bestL, refined, lag_time, bestL * hbar, refined * hbar);
  std::printf("target=%.4f  rel errors: lag_time=%.3f refined.hbar=%.3f\n",
              2 * M_PI / std::sqrt(3.0),
              std::abs(lag_time - 2 * M_PI / std::sqrt(3.0)) / (2 * M_PI / std::sqrt(3.0)),
              std::abs(refined * hbar - 2 * M_PI / std::sqrt(3.0)) / (2 * M_PI / std::sqrt(3.0)));
  for (int L = 15; L <= 28; ++L) std::printf("  r[%d]=%.6g\n", L, r[L]);
  return 0;
}
