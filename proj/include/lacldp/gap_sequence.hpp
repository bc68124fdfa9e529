#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace lacldp {

using BigInt = boost::multiprecision::cpp_int;

// Generator of strictly increasing positive integer sequences a_1, a_2, ...
class GapSequence {
 public:
  struct Geometric { long q; };
  struct ShiftedGeometric { long q; long shift; };
  struct Explicit { std::vector<BigInt> terms; };
  struct Factorial {};
  struct SuperExp { long base; };
  using Variant = std::variant<Geometric, ShiftedGeometric, Explicit, Factorial, SuperExp>;

  static GapSequence geometric(long q);                  // q^k
  static GapSequence shifted_geometric(long q, long shift);  // q^k + shift
  static GapSequence explicit_terms(std::vector<BigInt> terms);
  static GapSequence factorial();                        // k!
  static GapSequence super_exponential(long base);       // base^(k^2)

  // a_1..a_n; throws ArgumentError if an explicit list is shorter than n.
  std::vector<BigInt> terms(int n) const;

  // Number of available terms (unbounded generators report INT_MAX).
  int available() const;

  // a_{k+1}/a_k -> infinity.
  bool large_gap() const;

  // min over k < n of a_{k+1}/a_k.
  double min_ratio(int n) const;

  std::string describe() const;
  const Variant& variant() const { return variant_; }

 private:
  explicit GapSequence(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

// {"type":"geometric","q":2}, {"type":"shifted_geometric","q":2,"shift":1},
// {"type":"explicit","terms":[2,4]}, {"type":"factorial"},
// {"type":"super_exp","base":2}. Explicit terms may be given as strings for
// values beyond 64 bits.
GapSequence sequence_from_json(const nlohmann::json& doc);
nlohmann::json sequence_to_json(const GapSequence& seq);

}  // namespace lacldp
