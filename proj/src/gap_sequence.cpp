#include "lacldp/gap_sequence.hpp"

#include <algorithm>
#include <climits>
#include <limits>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "lacldp/errors.hpp"

namespace lacldp {

GapSequence GapSequence::geometric(long q) {
  if (q < 2) throw ConfigError("geometric sequence: q must be at least 2");
  return GapSequence(Geometric{q});
}

GapSequence GapSequence::shifted_geometric(long q, long shift) {
  if (q < 2) throw ConfigError("shifted geometric sequence: q must be at least 2");
  if (q + shift < 1) throw ConfigError("shifted geometric sequence: terms must be positive");
  return GapSequence(ShiftedGeometric{q, shift});
}

GapSequence GapSequence::explicit_terms(std::vector<BigInt> terms) {
  if (terms.empty()) throw ConfigError("explicit sequence: at least one term required");
  if (terms.front() < 1) throw ConfigError("explicit sequence: terms must be positive");
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i] <= terms[i - 1]) throw ConfigError("explicit sequence: terms must be strictly increasing");
  }
  return GapSequence(Explicit{std::move(terms)});
}

GapSequence GapSequence::factorial() { return GapSequence(Factorial{}); }

GapSequence GapSequence::super_exponential(long base) {
  if (base < 2) throw ConfigError("super-exponential sequence: base must be at least 2");
  return GapSequence(SuperExp{base});
}

std::vector<BigInt> GapSequence::terms(int n) const {
  if (n < 0) throw ArgumentError("sequence: n must be non-negative");
  std::vector<BigInt> out;
  out.reserve(n);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          BigInt a = 1;
          for (int k = 1; k <= n; ++k) out.push_back(a *= v.q);
        } else if constexpr (std::is_same_v<T, ShiftedGeometric>) {
          BigInt a = 1;
          for (int k = 1; k <= n; ++k) {
            a *= v.q;
            out.push_back(a + v.shift);
          }
        } else if constexpr (std::is_same_v<T, Explicit>) {
          if (n > static_cast<int>(v.terms.size())) {
            throw ArgumentError("explicit sequence has only " + std::to_string(v.terms.size()) +
                                " terms, " + std::to_string(n) + " requested");
          }
          out.assign(v.terms.begin(), v.terms.begin() + n);
        } else if constexpr (std::is_same_v<T, Factorial>) {
          BigInt a = 1;
          for (int k = 1; k <= n; ++k) out.push_back(a *= k);
        } else {
          for (int k = 1; k <= n; ++k) out.push_back(boost::multiprecision::pow(BigInt(v.base), k * k));
        }
      },
      variant_);
  return out;
}

int GapSequence::available() const {
  if (const auto* e = std::get_if<Explicit>(&variant_)) return static_cast<int>(e->terms.size());
  return INT_MAX;
}

bool GapSequence::large_gap() const {
  return std::holds_alternative<Factorial>(variant_) || std::holds_alternative<SuperExp>(variant_);
}

double GapSequence::min_ratio(int n) const {
  const std::vector<BigInt> a = terms(n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    // Ratio in floating point; exact enough for reporting.
    const boost::multiprecision::cpp_dec_float_50 r =
        boost::multiprecision::cpp_dec_float_50(a[k + 1]) / boost::multiprecision::cpp_dec_float_50(a[k]);
    best = std::min(best, r.convert_to<double>());
  }
  return best;
}

std::string GapSequence::describe() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Geometric>) {
          return "geometric(q=" + std::to_string(v.q) + ")";
        } else if constexpr (std::is_same_v<T, ShiftedGeometric>) {
          return "shifted_geometric(q=" + std::to_string(v.q) + ",shift=" + std::to_string(v.shift) + ")";
        } else if constexpr (std::is_same_v<T, Explicit>) {
          return "explicit(" + std::to_string(v.terms.size()) + " terms)";
        } else if constexpr (std::is_same_v<T, Factorial>) {
          return "factorial";
        } else {
          return "super_exp(base=" + std::to_string(v.base) + ")";
        }
      },
      variant_);
}

namespace {

void require_only(const nlohmann::json& doc, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : doc.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("sequence: unknown key '" + key + "'");
    }
  }
}

long integer_field(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_number_integer()) {
    throw ConfigError(std::string("sequence: '") + key + "' must be an integer");
  }
  return it->get<long>();
}

}  // namespace

GapSequence sequence_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    throw ConfigError("sequence: expected an object with a string 'type'");
  }
  const std::string type = doc["type"];
  if (type == "geometric") {
    require_only(doc, {"type", "q"});
    return GapSequence::geometric(integer_field(doc, "q"));
  }
  if (type == "shifted_geometric") {
    require_only(doc, {"type", "q", "shift"});
    return GapSequence::shifted_geometric(integer_field(doc, "q"), integer_field(doc, "shift"));
  }
  if (type == "explicit") {
    require_only(doc, {"type", "terms"});
    const auto it = doc.find("terms");
    if (it == doc.end() || !it->is_array()) throw ConfigError("sequence: 'terms' must be an array");
    std::vector<BigInt> terms;
    for (const auto& t : *it) {
      if (t.is_number_integer()) {
        terms.emplace_back(t.get<long long>());
      } else if (t.is_string()) {
        try {
          terms.emplace_back(t.get<std::string>());
        } catch (const std::exception&) {
          throw ConfigError("sequence: invalid integer string '" + t.get<std::string>() + "'");
        }
      } else {
        throw ConfigError("sequence: terms must be integers or decimal strings");
      }
    }
    return GapSequence::explicit_terms(std::move(terms));
  }
  if (type == "factorial") {
    require_only(doc, {"type"});
    return GapSequence::factorial();
  }
  if (type == "super_exp") {
    require_only(doc, {"type", "base"});
    return GapSequence::super_exponential(integer_field(doc, "base"));
  }
  throw ConfigError("sequence: unknown type '" + type + "'");
}

nlohmann::json sequence_to_json(const GapSequence& seq) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GapSequence::Geometric>) {
          return {{"type", "geometric"}, {"q", v.q}};
        } else if constexpr (std::is_same_v<T, GapSequence::ShiftedGeometric>) {
          return {{"type", "shifted_geometric"}, {"q", v.q}, {"shift", v.shift}};
        } else if constexpr (std::is_same_v<T, GapSequence::Explicit>) {
          nlohmann::json arr = nlohmann::json::array();
          for (const auto& t : v.terms) arr.push_back(t.str());
          return {{"type", "explicit"}, {"terms", arr}};
        } else if constexpr (std::is_same_v<T, GapSequence::Factorial>) {
          return {{"type", "factorial"}};
        } else {
          return {{"type", "super_exp"}, {"base", v.base}};
        }
      },
      seq.variant());
}

}  // namespace lacldp
