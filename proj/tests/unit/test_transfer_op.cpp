#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lacldp/empirical.hpp"
#include "lacldp/errors.hpp"
#include "lacldp/iid_cgf.hpp"
#include "lacldp/legendre.hpp"
#include "lacldp/transfer_op.hpp"
#include "support/oracles.hpp"

using namespace lacldp;

namespace {

std::vector<double> row_sums(const OperatorDiscretization& op) {
  std::vector<double> ones(op.size(), 1.0), y(op.size());
  op.apply(ones, y);
  return y;
}

}  // namespace

TEST_CASE("build_operator: constants are preserved at theta = 0") {
  for (int q : {2, 3, 5}) {
    for (int nodes : {2 * q, 8 * q, 101, 257}) {
      if (nodes < 2 * q) continue;
      const auto op = build_operator(PeriodicFunctionSpec::cosine(), q, 0.0, nodes);
      for (double s : row_sums(op)) CHECK(std::abs(s - 1.0) < 1e-12);
    }
  }
  const auto op = build_operator(PeriodicFunctionSpec::builtin("triangle"), 2, 0.0, 8);
  for (double s : row_sums(op)) CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("build_operator: entries are non-negative") {
  for (double theta : {-4.0, -0.3, 2.5}) {
    const auto op = build_operator(PeriodicFunctionSpec::builtin("cos_plus_cos2"), 3, theta, 49);
    for (double v : op.dense()) CHECK(v >= 0.0);
  }
}

TEST_CASE("build_operator: constant function scales the theta = 0 matrix") {
  const double c = 0.8;
  for (int q : {2, 4}) {
    for (double theta : {-1.5, 2.0}) {
      const auto a = build_operator(PeriodicFunctionSpec::constant(c), q, theta, 33).dense();
      const auto b = build_operator(PeriodicFunctionSpec::constant(c), q, 0.0, 33).dense();
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - std::exp(theta * c) * b[i]) < 1e-14);
    }
  }
}

TEST_CASE("build_operator: argument errors") {
  CHECK_THROWS_AS(build_operator(PeriodicFunctionSpec::cosine(), 1, 0.0, 16), ArgumentError);
  CHECK_THROWS_AS(build_operator(PeriodicFunctionSpec::cosine(), 4, 0.0, 7), ArgumentError);
  CHECK_THROWS_AS(cgf_geometric(PeriodicFunctionSpec::cosine(), 1, 1.0), ArgumentError);
}

TEST_CASE("transpose application is the adjoint") {
  const auto op = build_operator(PeriodicFunctionSpec::cosine(), 3, 0.7, 31);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(31), y(31), ax(31), aty(31);
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng);
  op.apply(x, ax);
  op.apply_transpose(y, aty);
  double l = 0.0, r = 0.0;
  for (int i = 0; i < 31; ++i) {
    l += y[i] * ax[i];
    r += aty[i] * x[i];
  }
  CHECK(l == doctest::Approx(r).epsilon(1e-13));
}

TEST_CASE("integral preservation at theta = 0 for random smooth g") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int q : {2, 3}) {
    const auto op = build_operator(PeriodicFunctionSpec::cosine(), q, 0.0, 6 * 64 + 1);
    const auto w = op.trapezoid_weights();
    for (int trial = 0; trial < 20; ++trial) {
      const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
      std::vector<double> g(op.size()), ag(op.size());
      for (int i = 0; i < op.size(); ++i) {
        const double x = op.node(i);
        g[i] = a + b * std::sin(2 * oracle::kPi * x + c) + d * std::cos(6 * oracle::kPi * x) + x * x;
      }
      op.apply(g, ag);
      double ig = 0.0, iag = 0.0;
      for (int i = 0; i < op.size(); ++i) {
        ig += w[i] * g[i];
        iag += w[i] * ag[i];
      }
      CHECK(std::abs(ig - iag) < 1e-10);
    }
  }
}

TEST_CASE("dominant_spectrum at theta = 0") {
  for (int nodes : {17, 65, 257}) {
    const auto s = dominant_spectrum(build_operator(PeriodicFunctionSpec::cosine(), 2, 0.0, nodes));
    CHECK(std::abs(s.lambda_theta - 1.0) < 1e-15);
    CHECK(std::log(s.lambda_theta) == doctest::Approx(0.0));
    for (double h : s.right_eigvec) CHECK(std::abs(h - 1.0) < 1e-12);
  }
  CHECK(cgf_geometric(PeriodicFunctionSpec::cosine(), 2, 0.0).sample.value == 0.0);
  CHECK(cgf_geometric(PeriodicFunctionSpec::builtin("triangle"), 3, 0.0).sample.value == 0.0);
}

TEST_CASE("spectral result invariants") {
  for (double theta : {-2.0, -0.5, 1.0, 3.0}) {
    const auto op = build_operator(PeriodicFunctionSpec::cosine(), 2, theta, 513);
    const auto s = dominant_spectrum(op);
    CHECK(s.lambda_theta > 0.0);
    CHECK(*std::min_element(s.right_eigvec.begin(), s.right_eigvec.end()) > 0.0);
    CHECK(*std::min_element(s.left_eigvec.begin(), s.left_eigvec.end()) >= 0.0);
    CHECK(s.gap_ratio > 0.0);
    CHECK(s.gap_ratio < 1.0);
    const auto w = op.trapezoid_weights();
    double mass = 0.0;
    for (int i = 0; i < op.size(); ++i) mass += s.left_eigvec[i] * w[i];
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("telescoping function has lambda = 1") {
  const auto f = PeriodicFunctionSpec::builtin("cos_minus_cos2");
  CHECK(std::abs(cgf_geometric(f, 2, 1.5).lambda - 1.0) < 1e-8);
  for (double theta : {-2.0, -1.0, 1.0, 2.0}) CHECK(std::abs(cgf_geometric(f, 2, theta).sample.value) < 1e-7);
}

TEST_CASE("cosine eigenvalue matches the Fourier-basis oracle") {
  for (int q : {2, 3, 5}) {
    for (double theta : {-2.0, -1.0, 0.5, 1.0, 3.0}) {
      const auto g = cgf_geometric(PeriodicFunctionSpec::cosine(), q, theta);
      const double ref = oracle::fourier_transfer_lambda_cosine(theta, q, 40);
      CHECK(std::abs(g.lambda - ref) < 1e-8 * ref);
      CHECK(g.achieved < 1e-9 * g.lambda);
    }
  }
}

TEST_CASE("cosine, q = 2, theta = 1: eigenvalue vs extrapolated exact MGFs") {
  const auto spec = PeriodicFunctionSpec::cosine();
  const auto g = cgf_geometric(spec, 2, 1.0);
  std::vector<int> ns;
  std::vector<double> vs;
  for (int n = 14; n <= 18; ++n) {
    ns.push_back(n);
    vs.push_back(exact_mgf(spec, GapSequence::geometric(2), n, 1.0).log_value / n);
  }
  CHECK(std::abs(richardson_in_inverse_n(ns, vs).limit - g.sample.value) < 1e-6);
}

TEST_CASE("Example 2 scaling") {
  const auto f = PeriodicFunctionSpec::sum_of_dilates({{1, PeriodicFunctionSpec::cosine()},
                                                      {2, PeriodicFunctionSpec::cosine()}});
  for (double theta : {0.5, 1.0, 2.0}) {
    const double a = cgf_geometric(f, 2, theta).sample.value;
    const double b = cgf_geometric(PeriodicFunctionSpec::cosine(), 2, 2 * theta).sample.value;
    CHECK(std::abs(a - b) < 1e-7);
  }
}

TEST_CASE("large q approaches the iid cgf") {
  const double g = cgf_geometric(PeriodicFunctionSpec::cosine(), 32, 1.0).sample.value;
  const double iid = oracle::log_i0(1.0);
  MESSAGE("q = 32, theta = 1: |log lambda - log I0| = " << std::abs(g - iid));
  CHECK(std::abs(g - iid) < 2e-3);
}

TEST_CASE("log lambda is convex in theta and its derivative is consistent") {
  std::vector<double> grid;
  for (int i = 0; i <= 24; ++i) grid.push_back(-3.0 + 0.25 * i);
  const auto curve = cgf_geometric_samples(PeriodicFunctionSpec::cosine(), 2, grid);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double v0 = curve.samples[i - 1].sample.value, v1 = curve.samples[i].sample.value,
                 v2 = curve.samples[i + 1].sample.value;
    CHECK(v1 <= 0.5 * (v0 + v2) + 1e-8);
  }
  // Derivative against a fine central difference of the Fourier oracle.
  for (std::size_t i : {4u, 12u, 20u}) {
    const double t = grid[i], h = 1e-3;
    const double fd = (std::log(oracle::fourier_transfer_lambda_cosine(t + h, 2, 40)) -
                       std::log(oracle::fourier_transfer_lambda_cosine(t - h, 2, 40))) /
                      (2 * h);
    CHECK(std::abs(curve.samples[i].sample.derivative - fd) < 1e-6);
  }
  CHECK(to_curve(curve).is_convex());
  CHECK(curve.max_n_used >= 65);
}

TEST_CASE("ratio limit: trivial cases") {
  const auto z = ratio_limit_check(PeriodicFunctionSpec::cosine(), 2, 0.0, 8);
  for (double r : z.ratios) CHECK(std::abs(r - 1.0) < 1e-12);
  CHECK(std::abs(z.predicted_limit - 1.0) < 1e-12);
  const auto c = ratio_limit_check(PeriodicFunctionSpec::constant(0.5), 3, 1.2, 6);
  for (double r : c.ratios) CHECK(std::abs(r - 1.0) < 1e-9);
}

TEST_CASE("ratio limit: cosine, q = 2, theta = 1") {
  const auto r = ratio_limit_check(PeriodicFunctionSpec::cosine(), 2, 1.0, 14);
  MESSAGE("increment decay " << r.decay_rate << ", spectral gap estimate " << r.gap_ratio);
  CHECK(r.decay_rate > 0.0);
  CHECK(r.decay_rate < 1.0);
  CHECK(r.final_gap < 1e-3 * r.predicted_limit);
  // Measured decay against the deflated-iteration estimate.
  CHECK(std::abs(r.decay_rate - r.gap_ratio) < 0.1);
  for (std::size_t i = 1; i < r.increments.size(); ++i) CHECK(r.increments[i] < r.increments[i - 1]);
}

TEST_CASE("oracle equivalence: n times the scaled-cgf gap stays bounded") {
  const auto spec = PeriodicFunctionSpec::cosine();
  for (int q : {2, 3}) {
    const int n_lo = q == 2 ? 8 : 5, n_hi = q == 2 ? 14 : 9;
    for (double theta : {-1.0, -0.5, 0.5, 1.0}) {
      const double ll = cgf_geometric(spec, q, theta).sample.value;
      double first = 0.0, worst = 0.0;
      for (int n = n_lo; n <= n_hi; ++n) {
        const double e = std::abs(exact_mgf(spec, GapSequence::geometric(q), n, theta).log_value - n * ll);
        if (n == n_lo) first = e;
        worst = std::max(worst, e);
      }
      CHECK(worst < 2.0 * first);
    }
  }
}
