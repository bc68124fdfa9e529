#include "lacldp/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "lacldp/errors.hpp"
#include "lacldp/parallel.hpp"

namespace lacldp {

namespace {

constexpr double kConvexitySlack = 1e-9;

bool is_uniform(const std::vector<double>& g) {
  const double h = g[1] - g[0];
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    if (std::abs((g[i + 1] - g[i]) - h) > 1e-9 * std::abs(h)) return false;
  }
  return true;
}

// Three-point derivative at x1 from samples at x0 < x1 < x2 (any order of
// the evaluation point among them).
double three_point(double x0, double x1, double x2, double v0, double v1, double v2, double at) {
  // Derivative of the Lagrange interpolant through the three samples.
  const double l0 = ((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2));
  const double l1 = ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2));
  const double l2 = ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1));
  return l0 * v0 + l1 * v1 + l2 * v2;
}

std::vector<double> estimate_derivatives(const std::vector<double>& g, const std::vector<double>& v) {
  const std::size_t n = g.size();
  std::vector<double> d(n);
  if (n == 2) {
    d[0] = d[1] = (v[1] - v[0]) / (g[1] - g[0]);
    return d;
  }
  const bool uniform = is_uniform(g);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double central = three_point(g[i - 1], g[i], g[i + 1], v[i - 1], v[i], v[i + 1], g[i]);
    if (uniform && i >= 2 && i + 2 < n) {
      const double wide = (v[i + 2] - v[i - 2]) / (g[i + 2] - g[i - 2]);
      d[i] = (4.0 * central - wide) / 3.0;
    } else {
      d[i] = central;
    }
  }
  d[0] = three_point(g[0], g[1], g[2], v[0], v[1], v[2], g[0]);
  d[n - 1] = three_point(g[n - 3], g[n - 2], g[n - 1], v[n - 3], v[n - 2], v[n - 1], g[n - 1]);
  return d;
}

}  // namespace

ScalarCurve::ScalarCurve(std::vector<double> grid, std::vector<double> values,
                         std::vector<double> derivatives)
    : grid_(std::move(grid)), values_(std::move(values)), derivatives_(std::move(derivatives)) {
  if (grid_.empty()) throw ArgumentError("ScalarCurve: empty grid");
  if (values_.size() != grid_.size()) throw ArgumentError("ScalarCurve: grid/value size mismatch");
  if (!derivatives_.empty() && derivatives_.size() != grid_.size()) {
    throw ArgumentError("ScalarCurve: grid/derivative size mismatch");
  }
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) throw ArgumentError("ScalarCurve: grid must be strictly increasing");
  }
  if (derivatives_.empty()) {
    if (grid_.size() < 2) throw ArgumentError("ScalarCurve: need two samples to estimate derivatives");
    derivatives_ = estimate_derivatives(grid_, values_);
  }
  for (std::size_t i = 1; i + 1 < grid_.size(); ++i) {
    const double h0 = grid_[i] - grid_[i - 1];
    const double h1 = grid_[i + 1] - grid_[i];
    const double s0 = (values_[i] - values_[i - 1]) / h0;
    const double s1 = (values_[i + 1] - values_[i]) / h1;
    const double d2 = (s1 - s0) * 0.5 * (h0 + h1);
    if (d2 < worst_second_difference_) {
      worst_second_difference_ = d2;
      worst_index_ = i;
    }
  }
  is_convex_ = worst_second_difference_ >= -kConvexitySlack;
}

std::size_t ScalarCurve::segment(double x) const {
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t idx = it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
  return std::min(idx, grid_.size() - 2);
}

double ScalarCurve::value_at(double x) const {
  if (grid_.size() == 1) return values_[0] + derivatives_[0] * (x - grid_[0]);
  const std::size_t i = segment(x);
  const double h = grid_[i + 1] - grid_[i];
  const double t = (x - grid_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * derivatives_[i] +
         (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * derivatives_[i + 1];
}

double ScalarCurve::derivative_at(double x) const {
  if (grid_.size() == 1) return derivatives_[0];
  const std::size_t i = segment(x);
  const double h = grid_[i + 1] - grid_[i];
  const double t = (x - grid_[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * values_[i] + (-6 * t2 + 6 * t) * values_[i + 1]) / h +
         (3 * t2 - 4 * t + 1) * derivatives_[i] + (3 * t2 - 2 * t) * derivatives_[i + 1];
}

ConvexFunction convex_from_curve(const ScalarCurve& curve) {
  if (!curve.is_convex()) {
    const std::size_t i = curve.worst_convexity_index();
    const auto& g = curve.grid();
    std::ostringstream msg;
    msg.precision(17);
    msg << "curve is not convex: second difference " << curve.worst_second_difference()
        << " at triple (" << g[i - 1] << ", " << g[i] << ", " << g[i + 1] << ")";
    throw NonConvexError(msg.str(), g[i - 1], g[i], g[i + 1]);
  }
  ConvexFunction f;
  // The curve is shared by value so the function outlives its argument.
  auto shared = std::make_shared<const ScalarCurve>(curve);
  f.value = [shared](double x) { return shared->value_at(x); };
  f.derivative = [shared](double x) { return shared->derivative_at(x); };
  f.lower = curve.grid().front();
  f.upper = curve.grid().back();
  return f;
}

RateValue legendre_transform(const ConvexFunction& lambda, double x, const LegendreOptions& options) {
  const double lo = lambda.lower;
  const double hi = lambda.upper;
  const double tol = options.derivative_tolerance;
  const double dlo = lambda.derivative(lo);
  const double dhi = lambda.derivative(hi);
  auto at = [&](double theta, RateKind kind) {
    return RateValue{theta * x - lambda.value(theta), kind, theta};
  };

  if (dhi - dlo <= 2.0 * tol) {
    // Affine on the working interval: a point-mass rate function.
    if (std::abs(x - 0.5 * (dlo + dhi)) <= tol) return at(std::clamp(0.0, lo, hi), RateKind::finite);
    return at(x > dhi ? hi : lo, RateKind::infinite);
  }
  if (x > dhi + tol) return at(hi, RateKind::infinite);
  if (x < dlo - tol) return at(lo, RateKind::infinite);
  if (std::abs(x - dhi) <= tol) return at(hi, RateKind::boundary);
  if (std::abs(x - dlo) <= tol) return at(lo, RateKind::boundary);

  double a = lo, b = hi, theta = 0.5 * (lo + hi);
  for (int it = 0; it < options.max_iterations; ++it) {
    theta = 0.5 * (a + b);
    const double d = lambda.derivative(theta);
    if (std::abs(d - x) <= tol) break;
    if (d < x) {
      a = theta;
    } else {
      b = theta;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(theta))) break;
  }
  return at(theta, RateKind::finite);
}

ConvexFunction conjugate_function(const ConvexFunction& lambda, const LegendreOptions& options) {
  ConvexFunction out;
  out.lower = lambda.derivative(lambda.lower);
  out.upper = lambda.derivative(lambda.upper);
  out.value = [lambda, options](double x) { return legendre_transform(lambda, x, options).value; };
  out.derivative = [lambda, options](double x) {
    return legendre_transform(lambda, x, options).theta_star;
  };
  return out;
}

RateFunctionCurve gartner_ellis_rate(const ConvexFunction& lambda, std::span<const double> x_grid,
                                     const LegendreOptions& options) {
  if (!(lambda.lower <= 0.0 && 0.0 <= lambda.upper)) {
    throw ArgumentError("gartner_ellis_rate: working interval must contain theta = 0");
  }
  if (std::abs(lambda.value(0.0)) > 1e-9) {
    throw ArgumentError("gartner_ellis_rate: cumulant generating function must vanish at 0");
  }
  RateFunctionCurve out;
  out.x_grid.assign(x_grid.begin(), x_grid.end());
  out.values.resize(x_grid.size());
  out.zero_location = lambda.derivative(0.0);
  parallel_for(x_grid.size(),
               [&](std::size_t i) { out.values[i] = legendre_transform(lambda, x_grid[i], options); });
  return out;
}

RateFunctionCurve gartner_ellis_rate(const ScalarCurve& lambda_curve, std::span<const double> x_grid,
                                     const LegendreOptions& options) {
  return gartner_ellis_rate(convex_from_curve(lambda_curve), x_grid, options);
}

}  // namespace lacldp
