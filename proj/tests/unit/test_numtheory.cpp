#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "lacldp/errors.hpp"
#include "lacldp/iid_cgf.hpp"
#include "lacldp/numtheory.hpp"
#include "support/oracles.hpp"

using namespace lacldp;

namespace {

const TrigPolynomial kCosine({Complex(0.0), Complex(0.5)});

std::vector<BigInt> big(const std::vector<std::int64_t>& a) { return {a.begin(), a.end()}; }

double p_d(double z, int d) {
  double term = 1.0, sum = 1.0;
  for (int j = 1; j <= d; ++j) sum += (term *= z / j);
  return sum;
}

// Direct trapezoid quadrature of prod_k p_d(theta f(a_k w)), exact for
// `points` above the degree of the integrand.
double product_quadrature(const TrigPolynomial& f, const std::vector<std::int64_t>& a, double theta, int d,
                          long points) {
  return oracle::trapezoid_periodic(
      [&](double w) {
        const long i = std::lround(w * points);
        double prod = 1.0;
        for (auto ak : a) {
          const long r = static_cast<long>((static_cast<__int128>(ak) * i) % points);
          prod *= p_d(theta * f(static_cast<double>(r) / points), d);
        }
        return prod;
      },
      points);
}

}  // namespace

TEST_CASE("count_solutions examples") {
  const std::vector<BigInt> s{2, 4};
  CHECK(count_solutions(s, 1).total == 1);
  CHECK(count_solutions(s, 2).total == 3);
  CHECK(count_solutions(s, 2).nontrivial == 2);
  CHECK(oracle::naive_count({2, 4}, 1) == 1);
  CHECK(oracle::naive_count({2, 4}, 2) == 3);
  CHECK(count_solutions(s, 2).method == "meet_in_the_middle");
}

TEST_CASE("meet-in-the-middle equals naive enumeration on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const long m = 1 + static_cast<long>(rng() % 3);
    std::set<std::int64_t> terms;
    while (static_cast<int>(terms.size()) < n) terms.insert(1 + static_cast<std::int64_t>(rng() % 40));
    const std::vector<std::int64_t> a(terms.begin(), terms.end());
    const auto c = count_solutions(big(a), m);
    const auto ref = oracle::naive_count(a, m);
    CHECK(c.total == ref);
    CHECK(c.total % 2 == 1);
    CHECK(count_solutions_pruned(big(a), m).total == ref);
  }
}

TEST_CASE("windowed counts") {
  const std::vector<BigInt> s{1, 2, 3, 50, 100};
  const auto w = count_solutions(s, 1, std::make_pair(4, 5));
  CHECK(w.total == oracle::naive_count({50, 100}, 1));
  CHECK(w.n == 2);
  CHECK_THROWS_AS(count_solutions(s, 1, std::make_pair(0, 2)), ArgumentError);
  CHECK_THROWS_AS(count_solutions(s, 1, std::make_pair(3, 6)), ArgumentError);
}

TEST_CASE("large integers") {
  const auto f = GapSequence::factorial().terms(22);
  const auto c = count_solutions(f, 1, std::make_pair(3, 22));
  CHECK(c.nontrivial == 0);
  // j_1 * 1 + j_2 * 2 = 0 has the extra solution (2, -1) for m = 2.
  CHECK(count_solutions(std::vector<BigInt>(f.begin(), f.begin() + 2), 2).total == 3);
}

TEST_CASE("enumeration budget") {
  CHECK(max_enumerable_n(1) == 24);
  CHECK(max_enumerable_n(3) == 16);
  const auto seq = GapSequence::geometric(2).terms(18);
  try {
    count_solutions(seq, 3);
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    CHECK(std::string(e.what()).find("16") != std::string::npos);
  }
  CHECK_THROWS_AS(count_solutions_pruned(GapSequence::geometric(2).terms(20), 3, 1000), BudgetError);
}

TEST_CASE("verify_gap_condition examples") {
  const auto g5 = verify_gap_condition(GapSequence::geometric(5).terms(10), 1, 3);
  REQUIRE(g5.k0.has_value());
  CHECK(*g5.k0 == 0);
  CHECK(g5.certified);
  CHECK(g5.lower_bound_holds);

  const auto g2 = verify_gap_condition(GapSequence::geometric(2).terms(10), 1, 3);
  CHECK_FALSE(g2.k0.has_value());
  CHECK_FALSE(g2.certified);

  for (int n : {8, 14, 20}) {
    const auto f = verify_gap_condition(GapSequence::factorial().terms(n), 2, 2);
    REQUIRE(f.k0.has_value());
    CHECK(*f.k0 == 4);
    CHECK(f.certified);
    CHECK(f.lower_bound_holds);
  }
}

TEST_CASE("certified windows have no nontrivial solutions") {
  // Ratios >= md + 1 throughout, bound dm.
  for (long m : {1, 2}) {
    for (long d : {1, 2}) {
      const long q = m * d + 1;
      const auto seq = GapSequence::geometric(q).terms(10);
      CHECK(count_solutions(seq, d * m).nontrivial == 0);
      CHECK(lemma_lower_bound(seq, m, d, 1, 10));
    }
  }
  // One step below the threshold the extremal tuple cancels.
  CHECK_FALSE(lemma_lower_bound(GapSequence::geometric(3).terms(6), 1, 3, 1, 6));
}

TEST_CASE("lemma coefficients reproduce p_d(theta f)") {
  const TrigPolynomial f({Complex(0.1), Complex(0.3, 0.2), Complex(-0.1, 0.05)});
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d : {0, 1, 3, 6}) {
    const auto b = lemma_coefficients(f, 0.8, d);
    const int dm = d * f.degree();
    REQUIRE(static_cast<int>(b.size()) == 2 * dm + 1);
    for (int i = 0; i < 10; ++i) {
      const double x = u(rng);
      Complex s = 0.0;
      for (int j = -dm; j <= dm; ++j) s += b[j + dm] * std::exp(Complex(0.0, 2 * oracle::kPi * j * x));
      CHECK(std::abs(s - p_d(0.8 * f(x), d)) < 1e-12);
    }
  }
}

TEST_CASE("product_integral_exact examples") {
  const auto seq = GapSequence::geometric(5);
  const auto zero = product_integral_exact(kCosine, seq, 1.0, 0, 0, 4);
  CHECK(zero.lhs == 1.0);
  CHECK(zero.rhs == 1.0);

  const auto p = product_integral_exact(kCosine, seq, 1.0, 3, 0, 4);
  CHECK(std::abs(p.lhs - p.rhs) < 1e-12);
  CHECK(std::abs(p.lhs - product_quadrature(kCosine, {5, 25, 125, 625}, 1.0, 3, 4096)) < 1e-10);

  const auto single = product_integral_exact(kCosine, seq, 1.3, 3, 2, 3);
  CHECK(std::abs(single.lhs - product_quadrature(kCosine, {125}, 1.3, 3, 1024)) < 1e-12);
  CHECK(std::abs(single.lhs - lemma_b0(kCosine, 1.3, 3)) < 1e-12);
}

TEST_CASE("product_integral_exact refuses without the gap condition") {
  CHECK_THROWS_AS(product_integral_exact(kCosine, GapSequence::geometric(2), 1.0, 3, 0, 4), RefusalError);
  // Factorial with m = 2, d = 2 certifies k_0 = 4, not k_0 = 1.
  const TrigPolynomial f2({Complex(0.0), Complex(0.5), Complex(0.25)});
  CHECK_THROWS_AS(product_integral_exact(f2, GapSequence::factorial(), 1.0, 2, 1, 6), RefusalError);
  const auto ok = product_integral_exact(f2, GapSequence::factorial(), 1.0, 2, 4, 7);
  CHECK(std::abs(ok.lhs - ok.rhs) < 1e-12);
}

TEST_CASE("product_integral_exact matches direct quadrature on feasible instances") {
  struct Case {
    TrigPolynomial f;
    long q;
    int d, n;
    double theta;
  };
  const std::vector<Case> cases{
      {kCosine, 4, 3, 4, 0.7},
      {kCosine, 5, 4, 4, -1.1},
      {TrigPolynomial({Complex(0.0), Complex(0.5), Complex(0.5)}), 5, 2, 4, 0.9},
      {TrigPolynomial({Complex(0.2), Complex(0.1, 0.3)}), 3, 2, 5, 1.4},
  };
  for (const auto& c : cases) {
    // The exact path only accepts certified k_0.
    const auto seq = GapSequence::geometric(c.q);
    const auto terms = seq.terms(c.n);
    const auto g = verify_gap_condition(terms, c.f.degree(), c.d);
    if (!g.certified || !g.k0) continue;
    std::vector<std::int64_t> a;
    for (int k = *g.k0 + 1; k <= c.n; ++k) a.push_back(static_cast<std::int64_t>(terms[k - 1]));
    long points = 1;
    std::int64_t degree = 0;
    for (auto ak : a) degree += ak * c.d * c.f.degree();
    while (points <= 2 * degree) points *= 2;
    const auto p = product_integral_exact(c.f, seq, c.theta, c.d, *g.k0, c.n);
    CHECK(std::abs(p.lhs - product_quadrature(c.f, a, c.theta, c.d, points)) < 1e-10);
    CHECK(std::abs(p.lhs - p.rhs) < 1e-10);
  }
}

TEST_CASE("b0_limit_check examples") {
  const std::vector<int> ds{1, 2, 4, 8, 12, 16, 20};
  const auto z = b0_limit_check(kCosine, 0.0, ds);
  for (double b : z.b0) CHECK(b == 1.0);

  CHECK(std::abs(lemma_b0(kCosine, 1.0, 20) - oracle::bessel_i(0, 1.0)) < 1e-15);

  const TrigPolynomial c({Complex(0.6)});
  for (int d : {0, 1, 3, 7}) CHECK(lemma_b0(c, 1.5, d) == doctest::Approx(p_d(0.9, d)).epsilon(1e-15));

  const auto r = b0_limit_check(kCosine, 2.0, ds);
  CHECK(r.eventually_monotone);
  CHECK(r.limit == doctest::Approx(oracle::bessel_i(0, 2.0)).epsilon(1e-12));
  CHECK(r.gap.back() < 1e-12);
}
