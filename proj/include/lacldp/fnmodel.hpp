#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace lacldp {

using Complex = std::complex<double>;

// Real trigonometric polynomial f(x) = sum_{|j|<=m} c_j e^{2 pi i j x}.
// Only c_0..c_m are stored; c_{-j} = conj(c_j), so the value is real by
// construction. c_0 must be real.
class TrigPolynomial {
 public:
  TrigPolynomial() : coeffs_{Complex{}} {}
  explicit TrigPolynomial(std::vector<Complex> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  // Two-sided coefficient access, zero outside [-m, m].
  Complex coefficient(int j) const;

  double operator()(double x) const;
  // Full two-sided sum, without exploiting symmetry.
  Complex evaluate_complex(double x) const;

  // 2 pi sum_{|j|<=m} |j| |c_j|.
  double lipschitz_bound() const;

 private:
  std::vector<Complex> coeffs_;
};

enum class BuiltinKind { cosine, cos_plus_cos2, cos_minus_cos2, constant, triangle };

struct Builtin {
  BuiltinKind kind = BuiltinKind::cosine;
  double value = 0.0;  // used by `constant`
};

// Parses a builtin name; throws ConfigError for unknown names or parameters.
Builtin make_builtin(const std::string& name, const std::map<std::string, double>& params = {});
std::string builtin_name(BuiltinKind kind);

// Declarative description of a continuous 1-periodic real function.
// Immutable; copies share structure.
class PeriodicFunctionSpec {
 public:
  struct Scaled;
  struct SumOfDilates;
  struct Node;

  static PeriodicFunctionSpec trig(TrigPolynomial poly);
  static PeriodicFunctionSpec builtin(const std::string& name,
                                      const std::map<std::string, double>& params = {});
  static PeriodicFunctionSpec scaled(double c, PeriodicFunctionSpec inner);
  static PeriodicFunctionSpec sum_of_dilates(
      std::vector<std::pair<long, PeriodicFunctionSpec>> terms);

  static PeriodicFunctionSpec cosine() { return builtin("cosine"); }
  static PeriodicFunctionSpec constant(double c) { return builtin("constant", {{"value", c}}); }

  // f(x mod 1).
  double operator()(double x) const;

  // Exact trigonometric-polynomial form when every leaf is one.
  std::optional<TrigPolynomial> as_trig_polynomial() const;

  // Upper bound on the Lipschitz constant; exact for trig polynomials.
  double lipschitz_bound() const;

  const Node& node() const { return *node_; }

 private:
  explicit PeriodicFunctionSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct PeriodicFunctionSpec::Scaled {
  double c;
  PeriodicFunctionSpec inner;
};

struct PeriodicFunctionSpec::SumOfDilates {
  std::vector<std::pair<long, PeriodicFunctionSpec>> terms;
};

double evaluate(const PeriodicFunctionSpec& spec, double x);

// JSON codec for function specs:
//   {"type":"trigpoly","coeffs":[[re,im],...]}
//   {"type":"builtin","name":"cosine"}  (optional "params":{...})
//   {"type":"scaled","c":2.0,"inner":{...}}
//   {"type":"sum_of_dilates","terms":[[1,{...}],[2,{...}]]}
PeriodicFunctionSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const PeriodicFunctionSpec& spec);

// Sampled range of f on a 2^16 grid; the true extrema lie within `slack`
// (half a grid step times the Lipschitz bound) of the sampled ones.
struct ValueRange {
  double min = 0.0;
  double max = 0.0;
  double slack = 0.0;
};
ValueRange value_range(const PeriodicFunctionSpec& spec);

// Largest difference quotient on a 2^16 grid. A lower estimate of the
// Lipschitz constant, used to sanity-check the analytic bound.
double lipschitz_grid_estimate(const PeriodicFunctionSpec& spec);

struct DecayFit {
  double M = 0.0;
  double beta = 0.0;
};

// c_k for k in [0, K]; c_{-k} = conj(c_k).
class FourierCoefficients {
 public:
  FourierCoefficients() = default;
  explicit FourierCoefficients(std::vector<Complex> nonnegative)
      : coeffs_(std::move(nonnegative)) {}

  int max_index() const { return static_cast<int>(coeffs_.size()) - 1; }
  Complex operator[](int k) const;
  const std::vector<Complex>& nonnegative() const { return coeffs_; }

  std::optional<DecayFit> decay;

 private:
  std::vector<Complex> coeffs_;
};

// Trapezoid rule on 2^14 points; exact pass-through for trig polynomials.
FourierCoefficients fourier_coefficients(const PeriodicFunctionSpec& spec, int K);

enum class TruncationMode { partial_sum, fejer };
TrigPolynomial truncate_fourier(const PeriodicFunctionSpec& spec, int m, TruncationMode mode);

struct DecayCheck {
  bool holds = true;
  // Index with the largest excess |c_k| - M |k|^-beta; nullopt when none.
  std::optional<int> worst_index;
};
DecayCheck check_fourier_decay(const FourierCoefficients& coeffs, double M, double beta);

// Least-squares slope of log|c_k| against log k over coefficients above the
// noise floor gives beta; M is then the smallest constant satisfying the
// bound on all computed k.
DecayFit fit_fourier_decay(const FourierCoefficients& coeffs, double noise_floor = 1e-13);

}  // namespace lacldp
