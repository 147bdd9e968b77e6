#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace mergepred::testutil {

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Nodes and weights by Newton iteration on the Legendre recurrence.
inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

struct BoxAverage {
  double mean{0.0};        // integral of g * exp(-f) / integral of exp(-f)
  double min_f{0.0};
  bool all_finite{true};   // no node hit the infeasible region
};

/// Tensor-product Gauss-Legendre average of g under exp(-f) over a box.
inline BoxAverage quadrature_mean(
    const std::function<double(const std::array<double, 3>&)>& neg_log_density,
    const std::function<double(const std::array<double, 3>&)>& g,
    const std::array<double, 3>& lo, const std::array<double, 3>& hi, int n_per_axis) {
  const GaussLegendre rule = gauss_legendre(n_per_axis);

  std::vector<std::array<double, 3>> points;
  std::vector<double> f_values;
  std::vector<double> w_values;
  points.reserve(static_cast<std::size_t>(n_per_axis) * n_per_axis * n_per_axis);

  BoxAverage out;
  double min_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_per_axis; ++i) {
    for (int j = 0; j < n_per_axis; ++j) {
      for (int k = 0; k < n_per_axis; ++k) {
        std::array<double, 3> theta{
            0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * rule.nodes[i],
            0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * rule.nodes[j],
            0.5 * (lo[2] + hi[2]) + 0.5 * (hi[2] - lo[2]) * rule.nodes[k]};
        const double f = neg_log_density(theta);
        if (!std::isfinite(f)) out.all_finite = false;
        min_f = std::min(min_f, f);
        points.push_back(theta);
        f_values.push_back(f);
        w_values.push_back(rule.weights[i] * rule.weights[j] * rule.weights[k]);
      }
    }
  }
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const double density = std::isfinite(f_values[idx])
                               ? std::exp(-(f_values[idx] - min_f))
                               : 0.0;
    mass += w_values[idx] * density;
    moment += w_values[idx] * density * g(points[idx]);
  }
  out.mean = moment / mass;
  out.min_f = min_f;
  return out;
}

}  // namespace mergepred::testutil
