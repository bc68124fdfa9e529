#include "lacldp/cli/verify.hpp"

#include <algorithm>
#include <cmath>

#include "lacldp/cli/output.hpp"
#include "lacldp/empirical.hpp"
#include "lacldp/errors.hpp"
#include "lacldp/iid_cgf.hpp"
#include "lacldp/numtheory.hpp"
#include "lacldp/transfer_op.hpp"

namespace lacldp::cli {

namespace {

PeriodicFunctionSpec cos_plus_cos2() { return PeriodicFunctionSpec::builtin("cos_plus_cos2"); }
PeriodicFunctionSpec cos_minus_cos2() { return PeriodicFunctionSpec::builtin("cos_minus_cos2"); }

GeometricCgfOptions geometric_options(const RunConfig& c) {
  GeometricCgfOptions o;
  o.lambda_tolerance = c.tolerances.lambda;
  o.max_intervals = c.tolerances.max_intervals;
  return o;
}

// I_0(x) = sum_k (x^2/4)^k / (k!)^2.
double bessel_i0(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= (x * x / 4.0) / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

// Runs `body`, turning library errors into a failed check.
template <class Body>
CheckResult guarded(const std::string& name, Body&& body) {
  CheckResult r;
  r.name = name;
  try {
    body(r);
  } catch (const Error& e) {
    r.pass = false;
    r.details["error"] = std::string(e.kind()) + ": " + e.what();
  }
  return r;
}

CheckResult example1(const RunConfig& c) {
  return guarded("example1_operator_vs_quadrature", [&](CheckResult& r) {
    const auto spec = PeriodicFunctionSpec::cosine();
    const auto g = cgf_geometric(spec, 2, 1.0, geometric_options(c));
    std::vector<int> ns;
    std::vector<double> vs;
    for (int n = 14; n <= 18; ++n) {
      ns.push_back(n);
      vs.push_back(exact_mgf(spec, GapSequence::geometric(2), n, 1.0).log_value / n);
    }
    const Extrapolation e = richardson_in_inverse_n(ns, vs);
    const double diff = std::abs(e.limit - g.sample.value);
    r.details = {{"log_lambda", json_number(g.sample.value)}, {"extrapolated", json_number(e.limit)},
                 {"abs_difference", json_number(diff)}, {"tolerance", 1e-6}};
    r.pass = diff < 1e-6;
  });
}

CheckResult example2(const RunConfig& c) {
  return guarded("example2_scaling", [&](CheckResult& r) {
    double worst = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (double theta : {0.5, 1.0, 2.0}) {
      const double a = cgf_geometric(cos_plus_cos2(), 2, theta, geometric_options(c)).sample.value;
      const double b = cgf_geometric(PeriodicFunctionSpec::cosine(), 2, 2 * theta, geometric_options(c)).sample.value;
      worst = std::max(worst, std::abs(a - b));
      rows.push_back({{"theta", theta}, {"cos_plus_cos2", json_number(a)}, {"cos_at_2theta", json_number(b)}});
    }
    r.details = {{"values", rows}, {"max_abs_difference", json_number(worst)}, {"tolerance", 1e-6}};
    r.pass = worst < 1e-6;
  });
}

CheckResult example3(const RunConfig& c) {
  return guarded("example3_telescoping", [&](CheckResult& r) {
    double worst = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (double theta : {-2.0, -1.0, 1.0, 2.0}) {
      const double v = cgf_geometric(cos_minus_cos2(), 2, theta, geometric_options(c)).sample.value;
      worst = std::max(worst, std::abs(v));
      rows.push_back({{"theta", theta}, {"log_lambda", json_number(v)}});
    }
    r.details = {{"values", rows}, {"max_abs_log_lambda", json_number(worst)}, {"tolerance", 1e-7}};
    r.pass = worst < 1e-7;
  });
}

CheckResult example4() {
  return guarded("example4_shifted_sequence_report", [&](CheckResult& r) {
    const auto spec = cos_plus_cos2();
    const MgfRecord a = exact_mgf(spec, GapSequence::geometric(2), 6, 1.0);
    const MgfRecord b = exact_mgf(spec, GapSequence::shifted_geometric(2, 1), 6, 1.0);
    const double diff = b.value - a.value;
    r.details = {{"n", 6},
                 {"theta", 1.0},
                 {"geometric_mgf", json_number(a.value)},
                 {"shifted_geometric_mgf", json_number(b.value)},
                 {"difference", json_number(diff)},
                 {"relative_difference", json_number(diff / a.value)},
                 {"equality_asserted", false}};
    r.pass = std::isfinite(a.value) && std::isfinite(b.value) && a.value > 0 && b.value > 0;
  });
}

CheckResult lemma_identity() {
  return guarded("lemma_product_identity", [&](CheckResult& r) {
    const TrigPolynomial cosine({Complex(0.0), Complex(0.5)});
    const auto seq = GapSequence::geometric(5);
    const ProductIntegral p = product_integral_exact(cosine, seq, 1.0, 3, 0, 4);
    const GapCondition g = verify_gap_condition(seq.terms(4), 1, 3);
    const double diff = std::abs(p.lhs - p.rhs);
    r.details = {{"lhs", json_number(p.lhs)},
                 {"rhs", json_number(p.rhs)},
                 {"abs_difference", json_number(diff)},
                 {"tolerance", 1e-12},
                 {"k0", g.k0 ? nlohmann::json(*g.k0) : nlohmann::json(nullptr)},
                 {"certified", g.certified},
                 {"nontrivial_solutions", g.count ? g.count->nontrivial : 0}};
    r.pass = diff < 1e-12 && g.certified && g.k0 && *g.k0 == 0;
  });
}

CheckResult b0_limit() {
  return guarded("lemma_b0_limit", [&](CheckResult& r) {
    const TrigPolynomial cosine({Complex(0.0), Complex(0.5)});
    const double b0 = lemma_b0(cosine, 1.0, 20);
    const double i0 = bessel_i0(1.0);
    r.details = {{"d", 20}, {"b0", json_number(b0)}, {"bessel_i0", json_number(i0)},
                 {"abs_difference", json_number(std::abs(b0 - i0))}, {"tolerance", 1e-15}};
    r.pass = std::abs(b0 - i0) < 1e-15;
  });
}

CheckResult ratio_limit(const RunConfig& c) {
  return guarded("ratio_limit", [&](CheckResult& r) {
    const RatioLimitReport rep = ratio_limit_check(PeriodicFunctionSpec::cosine(), 2, 1.0, 14, geometric_options(c));
    nlohmann::json ratios = nlohmann::json::array();
    for (double v : rep.ratios) ratios.push_back(json_number(v));
    r.details = {{"theta", 1.0},
                 {"q", 2},
                 {"ratios", ratios},
                 {"predicted_limit", json_number(rep.predicted_limit)},
                 {"final_gap", json_number(rep.final_gap)},
                 {"increment_decay_rate", json_number(rep.decay_rate)},
                 {"spectral_gap_ratio", json_number(rep.gap_ratio)}};
    r.pass = rep.decay_rate > 0 && rep.decay_rate < 1 && rep.final_gap < 1e-3 * rep.predicted_limit;
  });
}

CheckResult oracle_equivalence(const RunConfig& c) {
  return guarded("oracle_equivalence", [&](CheckResult& r) {
    const auto spec = PeriodicFunctionSpec::cosine();
    const auto seq = GapSequence::geometric(2);
    bool pass = true;
    nlohmann::json rows = nlohmann::json::array();
    for (double theta : {-1.0, -0.5, 0.5, 1.0}) {
      const double log_lambda = cgf_geometric(spec, 2, theta, geometric_options(c)).sample.value;
      double first = 0.0, worst = 0.0;
      nlohmann::json scaled = nlohmann::json::array();
      for (int n = 8; n <= 14; ++n) {
        const double e = std::abs(exact_mgf(spec, seq, n, theta).log_value - n * log_lambda);
        if (n == 8) first = e;
        worst = std::max(worst, e);
        scaled.push_back(json_number(e));
      }
      const bool ok = worst < 2.0 * first;
      pass = pass && ok;
      rows.push_back({{"theta", theta}, {"n_times_gap", scaled}, {"bounded", ok}});
    }
    r.details = {{"q", 2}, {"n_range", {8, 14}}, {"values", rows}};
    r.pass = pass;
  });
}

CheckResult theorem_a(const RunConfig& c) {
  return guarded("large_gap_factorial", [&](CheckResult& r) {
    const auto spec = PeriodicFunctionSpec::cosine();
    const std::vector<int> ns{1, 2, 3, 4, 5, 6, 7, 8};
    bool pass = true;
    nlohmann::json rows = nlohmann::json::array();
    for (double theta : {0.5, 1.0}) {
      const ScaledCgfSequence s = scaled_cgf_sequence(spec, GapSequence::factorial(), theta, ns);
      const double iid = cgf_iid(spec, theta, {c.tolerances.iid}).value;
      const double diff = std::abs(s.extrapolation->limit - iid);
      pass = pass && diff < 5e-3;
      rows.push_back({{"theta", theta},
                      {"extrapolated", json_number(s.extrapolation->limit)},
                      {"residual", json_number(s.extrapolation->residual)},
                      {"iid", json_number(iid)},
                      {"abs_difference", json_number(diff)}});
    }
    r.details = {{"values", rows}, {"tolerance", 5e-3}};
    r.pass = pass;
  });
}

CheckResult diophantine() {
  return guarded("diophantine_counts", [&](CheckResult& r) {
    const std::vector<BigInt> seq{2, 4};
    const auto one = count_solutions(seq, 1);
    const auto two = count_solutions(seq, 2);
    r.details = {{"m1_total", one.total}, {"m2_total", two.total}, {"expected", {1, 3}}};
    r.pass = one.total == 1 && two.total == 3;
  });
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const RunConfig& c) {
  std::vector<CheckResult> out;
  out.push_back(example1(c));
  out.push_back(example2(c));
  out.push_back(example3(c));
  out.push_back(example4());
  out.push_back(lemma_identity());
  out.push_back(b0_limit());
  out.push_back(ratio_limit(c));
  out.push_back(oracle_equivalence(c));
  out.push_back(theorem_a(c));
  out.push_back(diophantine());
  return out;
}

nlohmann::json verify_report(const RunConfig& c, const std::vector<CheckResult>& checks) {
  nlohmann::json doc;
  doc["seed"] = c.seed;
  nlohmann::json arr = nlohmann::json::array();
  int passed = 0;
  for (const auto& ch : checks) {
    arr.push_back({{"name", ch.name}, {"pass", ch.pass}, {"details", ch.details}});
    passed += ch.pass ? 1 : 0;
  }
  doc["checks"] = arr;
  doc["passed"] = passed;
  doc["failed"] = static_cast<int>(checks.size()) - passed;
  doc["all_pass"] = passed == static_cast<int>(checks.size());
  return doc;
}

}  // namespace lacldp::cli
