#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lacldp/fnmodel.hpp"
#include "lacldp/gap_sequence.hpp"

namespace lacldp {

// Tuples (j_1..j_n) in [-m, m]^n with sum j_k a_k = 0.
struct SolutionCount {
  int n = 0;
  long m = 0;
  std::vector<BigInt> sequence;
  std::uint64_t total = 1;
  std::uint64_t nontrivial = 0;  // total - 1
  std::string method;            // "meet_in_the_middle" or "pruned_search"
};

// Enumeration budget for the table of half sums.
inline constexpr std::uint64_t kHalfSumBudget = std::uint64_t{1} << 24;
inline constexpr int kMaxEnumerationLength = 24;

// Largest n with (2m+1)^ceil(n/2) within budget (and n <= 24).
int max_enumerable_n(long m);

// Meet-in-the-middle count over a_{k_start}..a_{k_end} (1-based, inclusive)
// or the whole list. Throws BudgetError naming the largest feasible n.
SolutionCount count_solutions(std::span<const BigInt> sequence, long m,
                              std::optional<std::pair<int, int>> window = std::nullopt);

// Exact depth-first count from the largest term down, cutting branches whose
// partial sum exceeds m times the sum of the remaining terms. Cheap for
// rapidly growing sequences, where the meet-in-the-middle table is not.
// Throws BudgetError after `max_nodes` visited nodes.
SolutionCount count_solutions_pruned(std::span<const BigInt> sequence, long m,
                                     std::uint64_t max_nodes = std::uint64_t{1} << 28);

struct GapCondition {
  // Smallest k_0 >= 0 with a_{k+1} >= (md+1) a_k for every k >= max(k_0, 1);
  // nullopt when the last ratio already fails.
  std::optional<int> k0;
  // The count over the window [k_0+1, n] with bound dm has no nontrivial
  // solution.
  bool certified = false;
  // a_l > dm sum_{k_0<k<l} a_k for every l in the window (exact integers).
  bool lower_bound_holds = false;
  std::optional<SolutionCount> count;
};

GapCondition verify_gap_condition(std::span<const BigInt> sequence, long m, long d);

// Exact-integer form of the lemma's lower bound on the window
// [k_start, k_end] (1-based): the extremal tuple j_l = 1, j_k = -dm (k < l)
// leaves a positive sum for every l.
bool lemma_lower_bound(std::span<const BigInt> sequence, long m, long d, int k_start, int k_end);

// Fourier coefficients b_j(theta, d), j = -dm..dm, of p_d(theta f) where
// p_d(z) = sum_{j<=d} z^j/j!. Index j + dm.
std::vector<Complex> lemma_coefficients(const TrigPolynomial& trig, double theta, int d);

double lemma_b0(const TrigPolynomial& trig, double theta, int d);

struct ProductIntegral {
  double lhs = 1.0;  // int_0^1 prod_{k_0<k<=n} p_d(theta f(a_k w)) dw
  double rhs = 1.0;  // b_0(theta, d)^(n - k_0)
  std::size_t modes = 1;  // size of the largest intermediate Fourier support
};

inline constexpr std::size_t kProductModeBudget = std::size_t{1} << 22;

// Zero-frequency coefficient of the product, built by sparse convolution
// keyed by exact integer frequency. Throws RefusalError when the gap
// condition does not certify k_0, BudgetError when the support could exceed
// the mode budget.
ProductIntegral product_integral_exact(const TrigPolynomial& trig, const GapSequence& seq, double theta, int d,
                                       int k0, int n);

struct B0Limit {
  std::vector<int> d;
  std::vector<double> b0;
  std::vector<double> gap;   // |b_0 - int exp(theta f)|
  double limit = 1.0;        // int_0^1 exp(theta f)
  // The gaps are non-increasing from some index on (the tail past the
  // largest increase), and that tail has at least two entries.
  bool eventually_monotone = true;
};

B0Limit b0_limit_check(const TrigPolynomial& trig, double theta, std::span<const int> d_list);

}  // namespace lacldp
