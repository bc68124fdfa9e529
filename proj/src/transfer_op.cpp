#include "lacldp/transfer_op.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lacldp/empirical.hpp"
#include "lacldp/errors.hpp"
#include "lacldp/legendre.hpp"
#include "lacldp/parallel.hpp"

namespace lacldp {

// ---------------------------------------------------------------------------
// Discretization

OperatorDiscretization::OperatorDiscretization(int q, double theta, int nodes, std::vector<Entry> entries)
    : q_(q), theta_(theta), nodes_(nodes), entries_(std::move(entries)) {}

void OperatorDiscretization::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t width = 2 * static_cast<std::size_t>(q_);
  for (int i = 0; i < nodes_; ++i) {
    const Entry* e = entries_.data() + i * width;
    double s = 0.0;
    for (std::size_t k = 0; k < width; ++k) s += e[k].weight * x[e[k].column];
    y[i] = s;
  }
}

void OperatorDiscretization::apply_transpose(std::span<const double> x, std::span<double> y) const {
  const std::size_t width = 2 * static_cast<std::size_t>(q_);
  std::fill(y.begin(), y.end(), 0.0);
  for (int i = 0; i < nodes_; ++i) {
    const Entry* e = entries_.data() + i * width;
    for (std::size_t k = 0; k < width; ++k) y[e[k].column] += e[k].weight * x[i];
  }
}

std::vector<double> OperatorDiscretization::dense() const {
  std::vector<double> a(static_cast<std::size_t>(nodes_) * nodes_, 0.0);
  for (int i = 0; i < nodes_; ++i) {
    for (const Entry& e : row(i)) a[static_cast<std::size_t>(i) * nodes_ + e.column] += e.weight;
  }
  return a;
}

std::vector<double> OperatorDiscretization::trapezoid_weights() const {
  std::vector<double> w(nodes_, 1.0 / (nodes_ - 1));
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

OperatorDiscretization build_operator(const PeriodicFunctionSpec& spec, int q, double theta, int nodes) {
  if (q < 2) throw ArgumentError("build_operator: q must be at least 2 (q = 1 is not expanding)");
  if (nodes < 2 * q) {
    throw ArgumentError("build_operator: need at least 2q = " + std::to_string(2 * q) + " nodes, got " +
                        std::to_string(nodes));
  }
  if (!std::isfinite(spec.lipschitz_bound())) {
    throw ArgumentError("build_operator: function has no finite Lipschitz bound");
  }
  const long long intervals = nodes - 1;
  std::vector<OperatorDiscretization::Entry> entries(static_cast<std::size_t>(nodes) * 2 * q);
  for (int i = 0; i < nodes; ++i) {
    for (int k = 0; k < q; ++k) {
      // Preimage (w_i + k)/q sits at (i + k M)/q in units of the node spacing.
      const long long scaled = i + k * intervals;
      long long left = scaled / q;
      double frac = static_cast<double>(scaled % q) / q;
      if (left == intervals) {
        left = intervals - 1;
        frac = 1.0;
      }
      const double y = static_cast<double>(scaled) / (static_cast<double>(q) * intervals);
      const double weight = std::exp(theta * spec(y)) / q;
      auto* e = &entries[(static_cast<std::size_t>(i) * q + k) * 2];
      e[0] = {static_cast<int>(left), weight * (1.0 - frac)};
      e[1] = {static_cast<int>(left + 1), weight * frac};
    }
  }
  return OperatorDiscretization(q, theta, nodes, std::move(entries));
}

// ---------------------------------------------------------------------------
// Power iteration

namespace {

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

template <class Apply>
std::pair<double, int> power_iterate(Apply&& apply, std::vector<double>& x,
                                     const PowerIterationOptions& options, const char* which) {
  std::vector<double> y(x.size());
  double rq = 0.0, previous = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    apply(x, y);
    rq = dot(x, y) / dot(x, x);
    const double norm = sup_norm(y);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ConvergenceError(std::string("power iteration (") + which + "): iterate vanished or overflowed",
                             norm);
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / norm;
    if (it > 1 && std::abs(rq - previous) < options.tolerance * std::abs(rq)) return {rq, it};
    previous = rq;
  }
  apply(x, y);
  double residual = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) residual = std::max(residual, std::abs(y[i] - rq * x[i]));
  std::ostringstream msg;
  msg << "power iteration (" << which << ") did not converge in " << options.max_iterations
      << " iterations; last residual " << residual;
  throw ConvergenceError(msg.str(), residual);
}

// Growth rate of the iteration restricted to the complement of the
// dominant eigenvector. The start vector is smooth: a rough start excites
// spikes at the fixed point 0 of the map, which grow like exp(theta f(0))/q
// in the sup norm and would mask the second eigenvalue on smooth functions.
// Round-off feeds the same rough modes, so the iteration stops once the
// deflated part has shrunk to 1e-6 relative to the dominant one.
double deflated_growth(const OperatorDiscretization& op, std::span<const double> right,
                       std::span<const double> left_raw, double lambda, int iterations) {
  const std::size_t n = right.size();
  const double pairing = dot(left_raw, right);
  auto project = [&](std::vector<double>& v) {
    const double c = dot(left_raw, v) / pairing;
    for (std::size_t i = 0; i < n; ++i) v[i] -= c * right[i];
  };
  constexpr double kTwoPi = 6.283185307179586;
  std::vector<double> y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = op.node(static_cast<int>(i));
    y[i] = std::cos(kTwoPi * x) + 0.5 * std::sin(2 * kTwoPi * x) + 0.25 * std::cos(3 * kTwoPi * x);
  }
  project(y);
  double norm = sup_norm(y);
  if (norm == 0.0) return 0.0;
  for (double& v : y) v /= norm;
  std::vector<double> log_rates;
  double relative = 0.0;
  for (int it = 0; it < iterations && relative > std::log(1e-6); ++it) {
    op.apply(y, z);
    project(z);
    norm = sup_norm(z);
    if (norm < 1e-300) break;
    log_rates.push_back(std::log(norm / lambda));
    relative += log_rates.back();
    for (std::size_t i = 0; i < n; ++i) y[i] = z[i] / norm;
  }
  if (log_rates.empty()) return 0.0;
  const std::size_t first = log_rates.size() / 2;
  double sum = 0.0;
  for (std::size_t i = first; i < log_rates.size(); ++i) sum += log_rates[i];
  return std::exp(sum / static_cast<double>(log_rates.size() - first));
}

}  // namespace

SpectralResult dominant_spectrum(const OperatorDiscretization& op, const PowerIterationOptions& options) {
  const std::size_t n = static_cast<std::size_t>(op.size());
  SpectralResult out;
  out.n_used = op.size();
  out.right_eigvec.assign(n, 1.0);
  auto [lambda, iterations] = power_iterate(
      [&](std::span<const double> x, std::span<double> y) { op.apply(x, y); }, out.right_eigvec, options,
      "right");
  out.lambda_theta = lambda;
  out.iterations = iterations;
  if (!(lambda > 0.0)) throw ConvergenceError("dominant eigenvalue is not positive", lambda);

  if (!options.left_vector) return out;
  std::vector<double> left(n, 1.0);
  power_iterate([&](std::span<const double> x, std::span<double> y) { op.apply_transpose(x, y); }, left,
                options, "left");
  const std::vector<double> w = op.trapezoid_weights();
  const double mass = std::accumulate(left.begin(), left.end(), 0.0);
  out.left_eigvec.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.left_eigvec[i] = left[i] / (mass * w[i]);

  if (options.gap_iterations > 0) {
    out.gap_ratio = deflated_growth(op, out.right_eigvec, left, lambda, options.gap_iterations);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid-converged cumulant generating function

namespace {

int first_interval_count(int q, int initial) {
  // A multiple of q keeps the interpolation pattern identical across
  // refinements, which the Richardson step relies on.
  int m = q;
  while (m < initial || m + 1 < 2 * q) m *= 2;
  return m;
}

struct LevelResult {
  double extrapolated = 1.0;
  double raw = 1.0;
  double achieved = 0.0;
  int intervals = 0;
  int previous_intervals = 0;
  SpectralResult spectrum;
};

LevelResult converge_lambda(const PeriodicFunctionSpec& spec, int q, double theta,
                            const GeometricCgfOptions& options) {
  PowerIterationOptions light = options.power;
  light.left_vector = false;
  light.gap_iterations = 0;

  std::vector<double> raw;
  std::vector<double> extrapolated;
  int m = first_interval_count(q, options.initial_intervals);
  int previous_m = 0;
  double achieved = std::numeric_limits<double>::infinity();
  for (; m <= options.max_intervals; previous_m = m, m *= 2) {
    raw.push_back(dominant_spectrum(build_operator(spec, q, theta, m + 1), light).lambda_theta);
    const std::size_t j = raw.size() - 1;
    if (j >= 1) extrapolated.push_back((4.0 * raw[j] - raw[j - 1]) / 3.0);
    if (extrapolated.size() >= 2) {
      const double e1 = extrapolated.back();
      const double e0 = extrapolated[extrapolated.size() - 2];
      achieved = std::abs(e1 - e0) / std::abs(e1);
      if (achieved < options.lambda_tolerance) {
        LevelResult out;
        out.extrapolated = e1;
        out.raw = raw.back();
        out.achieved = achieved;
        out.intervals = m;
        out.previous_intervals = previous_m;
        out.spectrum = dominant_spectrum(build_operator(spec, q, theta, m + 1), options.power);
        return out;
      }
    }
  }
  std::ostringstream msg;
  msg << "cgf_geometric: eigenvalue not converged at the grid cap (" << options.max_intervals + 1
      << " nodes) for q=" << q << ", theta=" << theta << "; achieved relative change " << achieved;
  throw ConvergenceError(msg.str(), achieved);
}

// Extrapolated eigenvalue from two fixed grids.
double extrapolated_lambda(const PeriodicFunctionSpec& spec, int q, double theta, int coarse, int fine,
                           const PowerIterationOptions& power) {
  PowerIterationOptions light = power;
  light.left_vector = false;
  light.gap_iterations = 0;
  const double a = dominant_spectrum(build_operator(spec, q, theta, coarse + 1), light).lambda_theta;
  const double b = dominant_spectrum(build_operator(spec, q, theta, fine + 1), light).lambda_theta;
  return (4.0 * b - a) / 3.0;
}

}  // namespace

GeometricCgfSample cgf_geometric(const PeriodicFunctionSpec& spec, int q, double theta,
                                 const GeometricCgfOptions& options) {
  if (q < 2) throw ArgumentError("cgf_geometric: q must be at least 2");
  if (!std::isfinite(theta)) throw ArgumentError("cgf_geometric: theta must be finite");
  GeometricCgfSample out;
  out.theta_flagged = std::abs(theta) > options.theta_limit;

  LevelResult level = converge_lambda(spec, q, theta, options);
  out.lambda = level.extrapolated;
  out.lambda_raw = level.raw;
  out.achieved = level.achieved;
  out.n_used = level.intervals + 1;
  out.spectrum = std::move(level.spectrum);

  const double h = options.derivative_step;
  const double plus =
      std::log(extrapolated_lambda(spec, q, theta + h, level.previous_intervals, level.intervals, options.power));
  const double minus =
      std::log(extrapolated_lambda(spec, q, theta - h, level.previous_intervals, level.intervals, options.power));
  // log lambda_0 = 0: the unweighted operator fixes constants.
  const double center = theta == 0.0 ? 0.0 : std::log(out.lambda);
  if (theta == 0.0) out.lambda = 1.0;

  out.sample.theta = theta;
  out.sample.value = center;
  out.sample.derivative = (plus - minus) / (2.0 * h);
  out.sample.second_derivative = (plus - 2.0 * center + minus) / (h * h);
  return out;
}

GeometricCurve cgf_geometric_samples(const PeriodicFunctionSpec& spec, int q,
                                     std::span<const double> theta_grid, const GeometricCgfOptions& options) {
  if (theta_grid.empty()) throw ArgumentError("cgf_geometric_samples: empty theta grid");
  GeometricCurve out;
  out.samples.resize(theta_grid.size());
  parallel_for(theta_grid.size(),
               [&](std::size_t i) { out.samples[i] = cgf_geometric(spec, q, theta_grid[i], options); });
  for (const auto& s : out.samples) out.max_n_used = std::max(out.max_n_used, s.n_used);
  return out;
}

ScalarCurve to_curve(const GeometricCurve& curve) {
  std::vector<double> grid, values, derivatives;
  for (const auto& s : curve.samples) {
    grid.push_back(s.sample.theta);
    values.push_back(s.sample.value);
    derivatives.push_back(s.sample.derivative);
  }
  return ScalarCurve(std::move(grid), std::move(values), std::move(derivatives));
}

// ---------------------------------------------------------------------------
// Ratio limit

RatioLimitReport ratio_limit_check(const PeriodicFunctionSpec& spec, int q, double theta, int n_max,
                                   const GeometricCgfOptions& options) {
  if (n_max < 1) throw ArgumentError("ratio_limit_check: n_max must be positive");
  RatioLimitReport out;
  out.q = q;
  out.theta = theta;
  const GeometricCgfSample g = cgf_geometric(spec, q, theta, options);
  out.lambda = g.lambda;
  out.gap_ratio = g.spectrum.gap_ratio;

  const GapSequence seq = GapSequence::geometric(q);
  for (int n = 1; n <= n_max; ++n) {
    const MgfRecord mgf = exact_mgf(spec, seq, n, theta);
    out.mgf.push_back(mgf.value);
    out.ratios.push_back(std::exp(mgf.log_value - n * std::log(g.lambda)));
  }

  const auto& h = g.spectrum.right_eigvec;
  const auto& nu = g.spectrum.left_eigvec;
  std::vector<double> w(h.size(), 1.0 / static_cast<double>(h.size() - 1));
  w.front() *= 0.5;
  w.back() *= 0.5;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    num += h[i] * w[i];
    den += h[i] * nu[i] * w[i];
  }
  out.predicted_limit = num / den;
  out.final_gap = std::abs(out.ratios.back() - out.predicted_limit);

  for (std::size_t i = 0; i + 1 < out.ratios.size(); ++i) {
    out.increments.push_back(std::abs(out.ratios[i + 1] - out.ratios[i]));
  }
  // Log-linear fit of the increments above the rounding floor.
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < out.increments.size(); ++i) {
    if (out.increments[i] > 1e-12 * std::abs(out.ratios[i])) {
      pts.emplace_back(static_cast<double>(i), std::log(out.increments[i]));
    }
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(pts.size());
    out.decay_rate = std::exp((k * sxy - sx * sy) / (k * sxx - sx * sx));
  }
  return out;
}

}  // namespace lacldp
