#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lacldp/errors.hpp"
#include "lacldp/fnmodel.hpp"
#include "support/oracles.hpp"

using namespace lacldp;

namespace {

std::vector<PeriodicFunctionSpec> all_builtins() {
  return {PeriodicFunctionSpec::cosine(), PeriodicFunctionSpec::builtin("cos_plus_cos2"),
          PeriodicFunctionSpec::builtin("cos_minus_cos2"), PeriodicFunctionSpec::constant(3.0),
          PeriodicFunctionSpec::builtin("triangle"),
          PeriodicFunctionSpec::scaled(2.0, PeriodicFunctionSpec::cosine()),
          PeriodicFunctionSpec::sum_of_dilates(
              {{1, PeriodicFunctionSpec::cosine()}, {3, PeriodicFunctionSpec::builtin("triangle")}}),
          PeriodicFunctionSpec::trig(TrigPolynomial({Complex(0.1), Complex(0.3, -0.2), Complex(0.0, 0.4)}))};
}

double grid_sup_error(const PeriodicFunctionSpec& f, const TrigPolynomial& p) {
  double worst = 0.0;
  for (int i = 0; i < 4096; ++i) {
    const double x = i / 4096.0;
    worst = std::max(worst, std::abs(f(x) - p(x)));
  }
  return worst;
}

}  // namespace

TEST_CASE("evaluate examples") {
  CHECK(PeriodicFunctionSpec::cosine()(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(PeriodicFunctionSpec::cosine()(0.25)) < 1e-15);
  const TrigPolynomial p({Complex(0.0), Complex(0.5), Complex(0.5)});
  CHECK(p(0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(PeriodicFunctionSpec::trig(p)(0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(evaluate(PeriodicFunctionSpec::builtin("cos_plus_cos2"), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("malformed builtins are configuration errors") {
  CHECK_THROWS_AS(PeriodicFunctionSpec::builtin("sine"), ConfigError);
  CHECK_THROWS_AS(PeriodicFunctionSpec::builtin("cosine", {{"value", 1.0}}), ConfigError);
  CHECK_THROWS_AS(PeriodicFunctionSpec::builtin("constant"), ConfigError);
  CHECK_THROWS_AS(TrigPolynomial({Complex(0.0, 1.0)}), ConfigError);
}

TEST_CASE("trig polynomial is real and periodic at random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const TrigPolynomial p({Complex(0.2), Complex(0.3, -0.7), Complex(-0.1, 0.25), Complex(0.05, 0.05)});
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(std::abs(p.evaluate_complex(x).imag()) < 1e-12);
    CHECK(std::abs(p(x + 1.0) - p(x)) < 1e-12);
    CHECK(std::abs(p.evaluate_complex(x).real() - p(x)) < 1e-12);
  }
}

TEST_CASE("every spec is real, periodic and agrees with its Lipschitz bound") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const auto& f : all_builtins()) {
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng);
      const double v = f(x);
      CHECK(std::isfinite(v));
      CHECK(std::abs(f(x + 1.0) - v) < 1e-12);
    }
    CHECK(lipschitz_grid_estimate(f) <= f.lipschitz_bound() * (1.0 + 1e-9));
  }
  const TrigPolynomial p({Complex(0.0), Complex(0.5), Complex(0.0, 0.25)});
  // Two-sided sum over j = -m..m.
  CHECK(p.lipschitz_bound() == doctest::Approx(2.0 * oracle::kPi * 2.0 * (0.5 + 2 * 0.25)));
}

TEST_CASE("fourier_coefficients examples") {
  const auto c = fourier_coefficients(PeriodicFunctionSpec::cosine(), 1);
  CHECK(std::abs(c[0]) < 1e-15);
  CHECK(std::abs(c[1] - Complex(0.5)) < 1e-15);
  CHECK(std::abs(c[-1] - Complex(0.5)) < 1e-15);

  const auto k = fourier_coefficients(PeriodicFunctionSpec::constant(3.0), 2);
  CHECK(std::abs(k[0] - Complex(3.0)) < 1e-12);
  for (int j : {-2, -1, 1, 2}) CHECK(std::abs(k[j]) < 1e-12);

  const auto t = fourier_coefficients(PeriodicFunctionSpec::builtin("cos_minus_cos2"), 2);
  CHECK(std::abs(t[1] - Complex(0.5)) < 1e-12);
  CHECK(std::abs(t[2] - Complex(-0.5)) < 1e-12);
  CHECK_THROWS_AS(fourier_coefficients(PeriodicFunctionSpec::cosine(), -1), ArgumentError);
}

TEST_CASE("quadrature coefficients match the aliased closed form for the triangle wave") {
  // |x| - 1/4 on [-1/2, 1/2]: c_k = -1/(pi^2 k^2) for odd k, 0 for even k != 0.
  // The kinks limit the 2^14-point rule to O(N^-2); the rule returns the
  // aliased sum over k + jN exactly.
  auto exact = [](long k) {
    return (k % 2) ? -1.0 / (oracle::kPi * oracle::kPi * static_cast<double>(k) * k) : 0.0;
  };
  const long N = 1 << 14;
  const auto c = fourier_coefficients(PeriodicFunctionSpec::builtin("triangle"), 9);
  CHECK(std::abs(c[0]) < 1e-12);
  for (int k = 1; k <= 9; ++k) {
    double aliased = exact(k);
    for (long j = 1; j < 200000; ++j) aliased += exact(k + j * N) + exact(k - j * N);
    CHECK(std::abs(c[k] - Complex(aliased)) < 1e-12);
    // Leading aliasing term: 2 zeta(2) / (pi^2 N^2) = 1/(3 N^2).
    CHECK(std::abs(c[k] - Complex(exact(k))) <= 1.001 / (3.0 * N * N));
    CHECK(std::abs(c[-k] - std::conj(c[k])) < 1e-15);
  }
}

TEST_CASE("conjugate symmetry and Parseval") {
  for (const auto& f : all_builtins()) {
    const int K = 12;
    const auto c = fourier_coefficients(f, K);
    double energy = 0.0;
    for (int k = -K; k <= K; ++k) {
      CHECK(std::abs(c[-k] - std::conj(c[k])) < 1e-15);
      energy += std::norm(c[k]);
    }
    const double l2 = oracle::trapezoid_periodic([&](double x) { return f(x) * f(x); }, 1 << 16);
    CHECK(energy <= l2 + 1e-10);
    if (auto p = f.as_trig_polynomial(); p && p->degree() <= K) CHECK(std::abs(energy - l2) < 1e-8);
  }
}

TEST_CASE("truncate_fourier examples") {
  const auto one = truncate_fourier(PeriodicFunctionSpec::cosine(), 1, TruncationMode::partial_sum);
  CHECK(grid_sup_error(PeriodicFunctionSpec::cosine(), one) < 1e-14);
  const auto zero = truncate_fourier(PeriodicFunctionSpec::cosine(), 0, TruncationMode::fejer);
  CHECK(zero.degree() == 0);
  for (double x : {0.0, 0.3, 0.71}) CHECK(std::abs(zero(x)) < 1e-15);
}

TEST_CASE("partial sums obey the decay-based sup bound") {
  const auto f = PeriodicFunctionSpec::builtin("triangle");
  const double M = 1.0 / (oracle::kPi * oracle::kPi);
  for (int m : {1, 2, 4, 8, 16}) {
    const auto fm = truncate_fourier(f, m, TruncationMode::partial_sum);
    double tail = 0.0;
    for (int k = m + 1; k < 2000000; ++k) tail += 1.0 / (static_cast<double>(k) * k);
    CHECK(grid_sup_error(f, fm) <= 2.0 * M * tail);
  }
}

TEST_CASE("Fejer error is non-increasing in m") {
  for (const auto& f : all_builtins()) {
    double prev = std::numeric_limits<double>::infinity();
    for (int m : {4, 8, 16, 32}) {
      const double e = grid_sup_error(f, truncate_fourier(f, m, TruncationMode::fejer));
      CHECK(e <= prev + 1e-12);
      prev = e;
    }
  }
}

TEST_CASE("check_fourier_decay examples") {
  const auto c = fourier_coefficients(PeriodicFunctionSpec::cosine(), 8);
  CHECK(check_fourier_decay(c, 1.0, 2.0).holds);

  std::vector<Complex> harmonic{Complex(0.0)};
  for (int k = 1; k <= 10; ++k) harmonic.emplace_back(1.0 / k);
  const auto r = check_fourier_decay(FourierCoefficients(harmonic), 1.0, 2.0);
  CHECK_FALSE(r.holds);
  REQUIRE(r.worst_index.has_value());
  CHECK(*r.worst_index == 2);
  CHECK_THROWS_AS(check_fourier_decay(c, 1.0, 1.0), ArgumentError);
}

TEST_CASE("fitted decay is consistent under refit at doubled K") {
  const auto f = PeriodicFunctionSpec::builtin("triangle");
  for (int m : {8, 16}) {
    const auto fejer = PeriodicFunctionSpec::trig(truncate_fourier(f, m, TruncationMode::fejer));
    const auto c1 = fourier_coefficients(fejer, 2 * m);
    const auto c2 = fourier_coefficients(fejer, 4 * m);
    const DecayFit a = fit_fourier_decay(c1);
    const DecayFit b = fit_fourier_decay(c2);
    CHECK(check_fourier_decay(c1, a.M, a.beta).holds);
    CHECK(check_fourier_decay(c2, a.M, a.beta).holds);
    CHECK(b.beta == doctest::Approx(a.beta).epsilon(1e-9));
    CHECK(b.M == doctest::Approx(a.M).epsilon(1e-9));
  }
  // The raw triangle decays like k^-2.
  const DecayFit t = fit_fourier_decay(fourier_coefficients(f, 64));
  CHECK(t.beta == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("JSON round trip") {
  for (const auto& f : all_builtins()) {
    const auto g = spec_from_json(spec_to_json(f));
    for (double x : {0.0, 0.13, 0.5, 0.77}) CHECK(g(x) == doctest::Approx(f(x)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"type":"builtin","name":"cosine","extra":1})")),
                  ConfigError);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json::parse(R"({"type":"wavelet"})")), ConfigError);
  const auto dil = spec_from_json(nlohmann::json::parse(
      R"({"type":"sum_of_dilates","terms":[[1,{"type":"builtin","name":"cosine"}],[2,{"type":"builtin","name":"cosine"}]]})"));
  CHECK(dil(0.1) == doctest::Approx(std::cos(0.2 * oracle::kPi) + std::cos(0.4 * oracle::kPi)));
}

TEST_CASE("value range brackets the true extrema") {
  const auto r = value_range(PeriodicFunctionSpec::builtin("cos_plus_cos2"));
  // True range of cos t + cos 2t: max 2, min -9/8.
  CHECK(r.max <= 2.0 + 1e-15);
  CHECK(r.max + r.slack >= 2.0);
  CHECK(r.min >= -1.125 - 1e-12);
  CHECK(r.min - r.slack <= -1.125);
}
