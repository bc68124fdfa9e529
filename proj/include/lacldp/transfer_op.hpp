#pragma once

#include <span>
#include <vector>

#include "lacldp/fnmodel.hpp"
#include "lacldp/iid_cgf.hpp"

namespace lacldp {

class ScalarCurve;

// Collocation matrix of the weighted transfer operator
//   g -> (1/q) sum_k exp(theta f((w + k)/q)) g((w + k)/q)
// on the uniform nodes w_i = i/(N-1). g is interpolated linearly between
// nodes, so each row has 2q non-zero entries; rows are stored sparsely.
class OperatorDiscretization {
 public:
  struct Entry {
    int column;
    double weight;
  };

  OperatorDiscretization(int q, double theta, int nodes, std::vector<Entry> entries);

  int q() const { return q_; }
  double theta() const { return theta_; }
  int size() const { return nodes_; }
  double node(int i) const { return static_cast<double>(i) / (nodes_ - 1); }

  std::span<const Entry> row(int i) const {
    return {entries_.data() + static_cast<std::size_t>(i) * 2 * q_, static_cast<std::size_t>(2 * q_)};
  }

  // y = A x and y = A^T x.
  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_transpose(std::span<const double> x, std::span<double> y) const;

  // Row-major dense copy; intended for small N.
  std::vector<double> dense() const;

  // Trapezoid weights on the nodes.
  std::vector<double> trapezoid_weights() const;

 private:
  int q_;
  double theta_;
  int nodes_;
  std::vector<Entry> entries_;
};

OperatorDiscretization build_operator(const PeriodicFunctionSpec& spec, int q, double theta, int nodes);

struct SpectralResult {
  double lambda_theta = 0.0;
  // h_theta at the nodes, sup-norm normalized.
  std::vector<double> right_eigvec;
  // Density of the left eigenvector with respect to the trapezoid weights,
  // normalized so that sum_i nu_i w_i = 1.
  std::vector<double> left_eigvec;
  // |lambda_2| / lambda_theta on smooth functions, from the decay rate of
  // the deflated iteration started at a smooth vector.
  double gap_ratio = 0.0;
  int iterations = 0;
  int n_used = 0;
};

struct PowerIterationOptions {
  double tolerance = 1e-13;  // relative change of the Rayleigh quotient
  int max_iterations = 100000;
  bool left_vector = true;
  int gap_iterations = 120;  // 0 skips the spectral-gap estimate
};

SpectralResult dominant_spectrum(const OperatorDiscretization& op, const PowerIterationOptions& options = {});

struct GeometricCgfOptions {
  int initial_intervals = 64;
  int max_intervals = 16384;
  double lambda_tolerance = 1e-9;
  double derivative_step = 1e-4;
  double theta_limit = 16.0;
  PowerIterationOptions power;
};

// log lambda_theta at the converged grid. Grid intervals double from
// `initial_intervals`; each doubling contributes a Richardson-extrapolated
// eigenvalue (the scheme is second order in the node spacing), and the
// refinement stops once two successive extrapolated eigenvalues agree to
// `lambda_tolerance`.
struct GeometricCgfSample {
  CgfSample sample;
  double lambda = 1.0;        // extrapolated eigenvalue
  double lambda_raw = 1.0;    // eigenvalue on the finest grid
  double achieved = 0.0;      // last |delta lambda| of the extrapolated sequence
  int n_used = 0;             // node count of the finest grid
  bool theta_flagged = false; // |theta| beyond options.theta_limit
  SpectralResult spectrum;    // on the finest grid
};

GeometricCgfSample cgf_geometric(const PeriodicFunctionSpec& spec, int q, double theta,
                                 const GeometricCgfOptions& options = {});

// cgf_geometric on a theta grid, returned as a curve with values and
// derivatives. Also reports the largest node count used.
struct GeometricCurve {
  std::vector<GeometricCgfSample> samples;
  int max_n_used = 0;
};
GeometricCurve cgf_geometric_samples(const PeriodicFunctionSpec& spec, int q,
                                     std::span<const double> theta_grid,
                                     const GeometricCgfOptions& options = {});
ScalarCurve to_curve(const GeometricCurve& curve);

struct RatioLimitReport {
  int q = 2;
  double theta = 0.0;
  double lambda = 1.0;
  std::vector<double> mgf;         // E[exp(theta S_n)], n = 1..n_max
  std::vector<double> ratios;      // r_n = mgf_n / lambda^n
  double predicted_limit = 1.0;    // int h / int h d(mu)
  double final_gap = 0.0;          // |r_{n_max} - predicted|
  std::vector<double> increments;  // |r_{n+1} - r_n|
  double decay_rate = 0.0;         // geometric fit of the increments
  double gap_ratio = 0.0;          // spectral estimate for comparison
};

RatioLimitReport ratio_limit_check(const PeriodicFunctionSpec& spec, int q, double theta, int n_max,
                                   const GeometricCgfOptions& options = {});

}  // namespace lacldp
