#include "lacldp/fnmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>

#include "lacldp/errors.hpp"

namespace lacldp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kFourierPoints = 1 << 14;
constexpr int kGridPoints = 1 << 16;

double reduce_unit(double x) {
  const double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

// ---------------------------------------------------------------------------
// TrigPolynomial

TrigPolynomial::TrigPolynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(Complex{});
  if (std::abs(coeffs_[0].imag()) > 1e-14) {
    throw ConfigError("trig polynomial: c_0 must be real for a real-valued function");
  }
  coeffs_[0] = Complex(coeffs_[0].real(), 0.0);
  while (coeffs_.size() > 1 && coeffs_.back() == Complex{}) coeffs_.pop_back();
}

Complex TrigPolynomial::coefficient(int j) const {
  const int m = degree();
  if (j > m || j < -m) return {};
  return j >= 0 ? coeffs_[j] : std::conj(coeffs_[-j]);
}

double TrigPolynomial::operator()(double x) const {
  const double r = reduce_unit(x);
  double sum = coeffs_[0].real();
  for (int j = 1; j <= degree(); ++j) {
    const double phase = kTwoPi * j * r;
    sum += 2.0 * (coeffs_[j].real() * std::cos(phase) - coeffs_[j].imag() * std::sin(phase));
  }
  return sum;
}

Complex TrigPolynomial::evaluate_complex(double x) const {
  Complex sum{};
  const int m = degree();
  for (int j = -m; j <= m; ++j) sum += coefficient(j) * std::polar(1.0, kTwoPi * j * x);
  return sum;
}

double TrigPolynomial::lipschitz_bound() const {
  double s = 0.0;
  for (int j = 1; j <= degree(); ++j) s += 2.0 * j * std::abs(coeffs_[j]);
  return kTwoPi * s;
}

// ---------------------------------------------------------------------------
// Builtins

Builtin make_builtin(const std::string& name, const std::map<std::string, double>& params) {
  Builtin b;
  if (name == "cosine") {
    b.kind = BuiltinKind::cosine;
  } else if (name == "cos_plus_cos2") {
    b.kind = BuiltinKind::cos_plus_cos2;
  } else if (name == "cos_minus_cos2") {
    b.kind = BuiltinKind::cos_minus_cos2;
  } else if (name == "triangle") {
    b.kind = BuiltinKind::triangle;
  } else if (name == "constant") {
    b.kind = BuiltinKind::constant;
    auto it = params.find("value");
    if (it == params.end()) throw ConfigError("builtin 'constant' requires parameter 'value'");
    b.value = it->second;
  } else {
    throw ConfigError("unknown builtin function '" + name + "'");
  }
  for (const auto& [key, _] : params) {
    if (!(b.kind == BuiltinKind::constant && key == "value")) {
      throw ConfigError("builtin '" + name + "' does not accept parameter '" + key + "'");
    }
  }
  return b;
}

std::string builtin_name(BuiltinKind kind) {
  switch (kind) {
    case BuiltinKind::cosine: return "cosine";
    case BuiltinKind::cos_plus_cos2: return "cos_plus_cos2";
    case BuiltinKind::cos_minus_cos2: return "cos_minus_cos2";
    case BuiltinKind::constant: return "constant";
    case BuiltinKind::triangle: return "triangle";
  }
  return "unknown";
}

namespace {

double eval_builtin(const Builtin& b, double r) {
  switch (b.kind) {
    case BuiltinKind::cosine: return std::cos(kTwoPi * r);
    case BuiltinKind::cos_plus_cos2: return std::cos(kTwoPi * r) + std::cos(2.0 * kTwoPi * r);
    case BuiltinKind::cos_minus_cos2: return std::cos(kTwoPi * r) - std::cos(2.0 * kTwoPi * r);
    case BuiltinKind::constant: return b.value;
    case BuiltinKind::triangle: return std::abs(r - std::round(r)) - 0.25;
  }
  return 0.0;
}

std::optional<TrigPolynomial> builtin_trig(const Builtin& b) {
  switch (b.kind) {
    case BuiltinKind::cosine: return TrigPolynomial({0.0, 0.5});
    case BuiltinKind::cos_plus_cos2: return TrigPolynomial({0.0, 0.5, 0.5});
    case BuiltinKind::cos_minus_cos2: return TrigPolynomial({0.0, 0.5, -0.5});
    case BuiltinKind::constant: return TrigPolynomial({b.value});
    case BuiltinKind::triangle: return std::nullopt;
  }
  return std::nullopt;
}

double builtin_lipschitz(const Builtin& b) {
  switch (b.kind) {
    case BuiltinKind::cosine: return kTwoPi;
    case BuiltinKind::cos_plus_cos2:
    case BuiltinKind::cos_minus_cos2: return 3.0 * kTwoPi;
    case BuiltinKind::constant: return 0.0;
    case BuiltinKind::triangle: return 1.0;
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// PeriodicFunctionSpec

struct PeriodicFunctionSpec::Node {
  std::variant<TrigPolynomial, Builtin, Scaled, SumOfDilates> value;
};

PeriodicFunctionSpec PeriodicFunctionSpec::trig(TrigPolynomial poly) {
  return PeriodicFunctionSpec(std::make_shared<Node>(Node{std::move(poly)}));
}

PeriodicFunctionSpec PeriodicFunctionSpec::builtin(const std::string& name,
                                                   const std::map<std::string, double>& params) {
  return PeriodicFunctionSpec(std::make_shared<Node>(Node{make_builtin(name, params)}));
}

PeriodicFunctionSpec PeriodicFunctionSpec::scaled(double c, PeriodicFunctionSpec inner) {
  if (!std::isfinite(c)) throw ConfigError("scaled: factor must be finite");
  return PeriodicFunctionSpec(std::make_shared<Node>(Node{Scaled{c, std::move(inner)}}));
}

PeriodicFunctionSpec PeriodicFunctionSpec::sum_of_dilates(
    std::vector<std::pair<long, PeriodicFunctionSpec>> terms) {
  if (terms.empty()) throw ConfigError("sum_of_dilates: at least one term required");
  return PeriodicFunctionSpec(std::make_shared<Node>(Node{SumOfDilates{std::move(terms)}}));
}

double PeriodicFunctionSpec::operator()(double x) const {
  const double r = reduce_unit(x);
  return std::visit(
      [r](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TrigPolynomial>) {
          return v(r);
        } else if constexpr (std::is_same_v<T, Builtin>) {
          return eval_builtin(v, r);
        } else if constexpr (std::is_same_v<T, Scaled>) {
          return v.c * v.inner(r);
        } else {
          double s = 0.0;
          for (const auto& [d, g] : v.terms) {
            // d * r mod 1, exact for |d| r below 2^52.
            s += g(reduce_unit(static_cast<double>(d) * r));
          }
          return s;
        }
      },
      node_->value);
}

std::optional<TrigPolynomial> PeriodicFunctionSpec::as_trig_polynomial() const {
  return std::visit(
      [](const auto& v) -> std::optional<TrigPolynomial> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TrigPolynomial>) {
          return v;
        } else if constexpr (std::is_same_v<T, Builtin>) {
          return builtin_trig(v);
        } else if constexpr (std::is_same_v<T, Scaled>) {
          auto inner = v.inner.as_trig_polynomial();
          if (!inner) return std::nullopt;
          std::vector<Complex> c = inner->coeffs();
          for (auto& x : c) x *= v.c;
          return TrigPolynomial(std::move(c));
        } else {
          std::vector<Complex> acc(1, Complex{});
          for (const auto& [d, g] : v.terms) {
            auto inner = g.as_trig_polynomial();
            if (!inner) return std::nullopt;
            acc[0] += inner->coefficient(0);
            const long dil = std::labs(d);
            if (dil == 0) {
              // g(0) is a constant.
              acc[0] += Complex((*inner)(0.0) - inner->coefficient(0).real(), 0.0);
              continue;
            }
            for (int j = 1; j <= inner->degree(); ++j) {
              const std::size_t idx = static_cast<std::size_t>(dil) * j;
              if (acc.size() <= idx) acc.resize(idx + 1);
              acc[idx] += d > 0 ? inner->coefficient(j) : inner->coefficient(-j);
            }
          }
          return TrigPolynomial(std::move(acc));
        }
      },
      node_->value);
}

double PeriodicFunctionSpec::lipschitz_bound() const {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TrigPolynomial>) {
          return v.lipschitz_bound();
        } else if constexpr (std::is_same_v<T, Builtin>) {
          return builtin_lipschitz(v);
        } else if constexpr (std::is_same_v<T, Scaled>) {
          return std::abs(v.c) * v.inner.lipschitz_bound();
        } else {
          double s = 0.0;
          for (const auto& [d, g] : v.terms) s += std::labs(d) * g.lipschitz_bound();
          return s;
        }
      },
      node_->value);
}

double evaluate(const PeriodicFunctionSpec& spec, double x) { return spec(x); }

// ---------------------------------------------------------------------------
// JSON

namespace {

void require_keys(const nlohmann::json& doc, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!doc.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

const nlohmann::json& field(const nlohmann::json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError(where + ": missing key '" + std::string(key) + "'");
  return *it;
}

}  // namespace

PeriodicFunctionSpec spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    throw ConfigError("function spec: expected an object with a string 'type'");
  }
  const std::string type = doc["type"];
  try {
    if (type == "trigpoly") {
      require_keys(doc, {"type", "coeffs"}, "trigpoly");
      const auto& arr = field(doc, "coeffs", "trigpoly");
      if (!arr.is_array() || arr.empty()) throw ConfigError("trigpoly: 'coeffs' must be a non-empty array");
      std::vector<Complex> c;
      for (const auto& pair : arr) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
          throw ConfigError("trigpoly: each coefficient must be [re, im]");
        }
        c.emplace_back(pair[0].get<double>(), pair[1].get<double>());
      }
      return PeriodicFunctionSpec::trig(TrigPolynomial(std::move(c)));
    }
    if (type == "builtin") {
      require_keys(doc, {"type", "name", "params"}, "builtin");
      const auto& name = field(doc, "name", "builtin");
      if (!name.is_string()) throw ConfigError("builtin: 'name' must be a string");
      std::map<std::string, double> params;
      if (auto it = doc.find("params"); it != doc.end()) {
        if (!it->is_object()) throw ConfigError("builtin: 'params' must be an object");
        for (const auto& [k, v] : it->items()) {
          if (!v.is_number()) throw ConfigError("builtin: parameter '" + k + "' must be numeric");
          params[k] = v.get<double>();
        }
      }
      return PeriodicFunctionSpec::builtin(name.get<std::string>(), params);
    }
    if (type == "scaled") {
      require_keys(doc, {"type", "c", "inner"}, "scaled");
      const auto& c = field(doc, "c", "scaled");
      if (!c.is_number()) throw ConfigError("scaled: 'c' must be numeric");
      return PeriodicFunctionSpec::scaled(c.get<double>(), spec_from_json(field(doc, "inner", "scaled")));
    }
    if (type == "sum_of_dilates") {
      require_keys(doc, {"type", "terms"}, "sum_of_dilates");
      const auto& terms = field(doc, "terms", "sum_of_dilates");
      if (!terms.is_array()) throw ConfigError("sum_of_dilates: 'terms' must be an array");
      std::vector<std::pair<long, PeriodicFunctionSpec>> out;
      for (const auto& t : terms) {
        if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer()) {
          throw ConfigError("sum_of_dilates: each term must be [integer, spec]");
        }
        out.emplace_back(t[0].get<long>(), spec_from_json(t[1]));
      }
      return PeriodicFunctionSpec::sum_of_dilates(std::move(out));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("function spec: ") + e.what());
  }
  throw ConfigError("function spec: unknown type '" + type + "'");
}

nlohmann::json spec_to_json(const PeriodicFunctionSpec& spec) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TrigPolynomial>) {
          nlohmann::json arr = nlohmann::json::array();
          for (const auto& c : v.coeffs()) arr.push_back({c.real(), c.imag()});
          return {{"type", "trigpoly"}, {"coeffs", arr}};
        } else if constexpr (std::is_same_v<T, Builtin>) {
          nlohmann::json j = {{"type", "builtin"}, {"name", builtin_name(v.kind)}};
          if (v.kind == BuiltinKind::constant) j["params"] = {{"value", v.value}};
          return j;
        } else if constexpr (std::is_same_v<T, PeriodicFunctionSpec::Scaled>) {
          return {{"type", "scaled"}, {"c", v.c}, {"inner", spec_to_json(v.inner)}};
        } else {
          nlohmann::json arr = nlohmann::json::array();
          for (const auto& [d, g] : v.terms) arr.push_back({d, spec_to_json(g)});
          return {{"type", "sum_of_dilates"}, {"terms", arr}};
        }
      },
      spec.node().value);
}

// ---------------------------------------------------------------------------
// Grid diagnostics

ValueRange value_range(const PeriodicFunctionSpec& spec) {
  ValueRange r{spec(0.0), spec(0.0), 0.0};
  for (int i = 1; i < kGridPoints; ++i) {
    const double v = spec(static_cast<double>(i) / kGridPoints);
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
  r.slack = spec.lipschitz_bound() * 0.5 / kGridPoints;
  return r;
}

double lipschitz_grid_estimate(const PeriodicFunctionSpec& spec) {
  double best = 0.0;
  double prev = spec(0.0);
  for (int i = 1; i <= kGridPoints; ++i) {
    const double v = spec(static_cast<double>(i) / kGridPoints);
    best = std::max(best, std::abs(v - prev) * kGridPoints);
    prev = v;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Fourier analysis

Complex FourierCoefficients::operator[](int k) const {
  const int K = max_index();
  if (k > K || k < -K) return {};
  return k >= 0 ? coeffs_[k] : std::conj(coeffs_[-k]);
}

FourierCoefficients fourier_coefficients(const PeriodicFunctionSpec& spec, int K) {
  if (K < 0) throw ArgumentError("fourier_coefficients: K must be non-negative");
  std::vector<Complex> c(static_cast<std::size_t>(K) + 1);
  if (auto poly = spec.as_trig_polynomial()) {
    for (int k = 0; k <= K; ++k) c[k] = poly->coefficient(k);
    return FourierCoefficients(std::move(c));
  }
  std::vector<double> samples(kFourierPoints);
  for (int i = 0; i < kFourierPoints; ++i) samples[i] = spec(static_cast<double>(i) / kFourierPoints);
  for (int k = 0; k <= K; ++k) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < kFourierPoints; ++i) {
      // Reduce k*i modulo the grid to keep phases in [0, 2 pi).
      const long long idx = (static_cast<long long>(k) * i) % kFourierPoints;
      const double phase = kTwoPi * static_cast<double>(idx) / kFourierPoints;
      re += samples[i] * std::cos(phase);
      im -= samples[i] * std::sin(phase);
    }
    c[k] = Complex(re / kFourierPoints, k == 0 ? 0.0 : im / kFourierPoints);
  }
  return FourierCoefficients(std::move(c));
}

TrigPolynomial truncate_fourier(const PeriodicFunctionSpec& spec, int m, TruncationMode mode) {
  if (m < 0) throw ArgumentError("truncate_fourier: m must be non-negative");
  const FourierCoefficients fc = fourier_coefficients(spec, m);
  std::vector<Complex> c = fc.nonnegative();
  if (mode == TruncationMode::fejer) {
    for (int j = 0; j <= m; ++j) c[j] *= 1.0 - static_cast<double>(j) / (m + 1);
  }
  return TrigPolynomial(std::move(c));
}

DecayCheck check_fourier_decay(const FourierCoefficients& coeffs, double M, double beta) {
  if (!(beta > 1.0) || !(M > 0.0)) throw ArgumentError("check_fourier_decay: need beta > 1 and M > 0");
  DecayCheck out;
  double worst_excess = 0.0;
  for (int k = 1; k <= coeffs.max_index(); ++k) {
    const double excess = std::abs(coeffs[k]) - M * std::pow(static_cast<double>(k), -beta);
    if (excess > 0.0) {
      out.holds = false;
      if (excess > worst_excess) {
        worst_excess = excess;
        out.worst_index = k;
      }
    }
  }
  return out;
}

DecayFit fit_fourier_decay(const FourierCoefficients& coeffs, double noise_floor) {
  std::vector<std::pair<double, double>> pts;
  for (int k = 1; k <= coeffs.max_index(); ++k) {
    const double a = std::abs(coeffs[k]);
    if (a > noise_floor) pts.emplace_back(std::log(static_cast<double>(k)), std::log(a));
  }
  DecayFit fit;
  if (pts.empty()) {
    // Constant function: any decay holds; report the smallest admissible pair.
    fit.beta = 2.0;
    fit.M = noise_floor;
    return fit;
  }
  if (pts.size() == 1) {
    fit.beta = 2.0;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    fit.beta = std::max(-slope, 1.0 + 1e-9);
  }
  for (int k = 1; k <= coeffs.max_index(); ++k) {
    fit.M = std::max(fit.M, std::abs(coeffs[k]) * std::pow(static_cast<double>(k), fit.beta));
  }
  // Absorb rounding in |c_k| k^beta so the fitted pair passes its own check.
  fit.M = fit.M == 0.0 ? noise_floor : fit.M * (1.0 + 1e-12);
  return fit;
}

}  // namespace lacldp
