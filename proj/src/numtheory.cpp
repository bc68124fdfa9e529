#include "lacldp/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "lacldp/errors.hpp"
#include "lacldp/fnmodel.hpp"
#include "lacldp/iid_cgf.hpp"

namespace lacldp {

namespace {

using i128 = __int128;

// Sums fit in 126 bits with room to spare when every |a_k| m n does.
bool fits_i128(std::span<const BigInt> a, long m) {
  BigInt bound = 0;
  for (const BigInt& v : a) bound += abs(v);
  bound *= m;
  return boost::multiprecision::msb(bound + 1) < 120;
}

i128 to_i128(const BigInt& v) {
  const BigInt mag = abs(v);
  const auto hi = static_cast<std::uint64_t>(mag >> 64);
  const auto lo = static_cast<std::uint64_t>(mag & std::numeric_limits<std::uint64_t>::max());
  const i128 out = static_cast<i128>((static_cast<unsigned __int128>(hi) << 64) | lo);
  return v < 0 ? -out : out;
}

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

template <typename T>
std::vector<T> half_sums(std::span<const T> a, long m) {
  std::vector<T> sums{T(0)};
  for (const T& v : a) {
    std::vector<T> next;
    next.reserve(sums.size() * (2 * m + 1));
    for (const T& s : sums) {
      for (long j = -m; j <= m; ++j) next.push_back(s + T(j) * v);
    }
    sums.swap(next);
  }
  return sums;
}

// Sorted table of distinct first-half sums with multiplicities; each
// second-half sum s is matched against -s by binary search.
template <typename T>
std::uint64_t meet_in_the_middle(std::span<const T> a, long m) {
  const std::size_t h = (a.size() + 1) / 2;
  std::vector<T> left = half_sums<T>(a.first(h), m);
  std::sort(left.begin(), left.end());
  std::vector<T> keys;
  std::vector<std::uint64_t> mult;
  for (const T& s : left) {
    if (keys.empty() || keys.back() != s) {
      keys.push_back(s);
      mult.push_back(1);
    } else {
      ++mult.back();
    }
  }
  left.clear();
  left.shrink_to_fit();
  const std::vector<T> right = half_sums<T>(a.subspan(h), m);
  std::uint64_t total = 0;
  for (const T& s : right) {
    const T target = -s;
    const auto it = std::lower_bound(keys.begin(), keys.end(), target);
    if (it != keys.end() && *it == target) total += mult[it - keys.begin()];
  }
  return total;
}

std::span<const BigInt> apply_window(std::span<const BigInt> seq, std::optional<std::pair<int, int>> window) {
  if (!window) return seq;
  const auto [lo, hi] = *window;
  if (lo < 1 || hi > static_cast<int>(seq.size()) || lo > hi + 1) {
    throw ArgumentError("count_solutions: window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] outside 1.." + std::to_string(seq.size()));
  }
  return seq.subspan(lo - 1, hi - lo + 1);
}

template <typename T>
struct PrunedSearch {
  std::vector<T> a;          // descending
  std::vector<T> remaining;  // m * sum of a[i..]
  long m;
  std::uint64_t nodes = 0;
  std::uint64_t max_nodes;

  std::uint64_t run(std::size_t i, const T& s) {
    if (++nodes > max_nodes) {
      throw BudgetError("count_solutions_pruned: search exceeded " + std::to_string(max_nodes) + " nodes");
    }
    if (i == a.size()) return s == T(0) ? 1 : 0;
    std::uint64_t count = 0;
    for (long j = -m; j <= m; ++j) {
      const T next = s + T(j) * a[i];
      const T bound = remaining[i + 1];
      if (next <= bound && -next <= bound) count += run(i + 1, next);
    }
    return count;
  }
};

template <typename T>
std::uint64_t pruned_count(std::vector<T> desc, long m, std::uint64_t max_nodes) {
  PrunedSearch<T> search{std::move(desc), {}, m, 0, max_nodes};
  search.remaining.assign(search.a.size() + 1, T(0));
  for (std::size_t i = search.a.size(); i-- > 0;) {
    const T mag = search.a[i] < T(0) ? T(-search.a[i]) : search.a[i];
    search.remaining[i] = search.remaining[i + 1] + T(m) * mag;
  }
  return search.run(0, T(0));
}

// Sparse Fourier series keyed by integer frequency.
template <typename K>
struct KeyHash {
  std::size_t operator()(const K& k) const {
    if constexpr (std::is_same_v<K, i128>) {
      const auto u = static_cast<unsigned __int128>(k);
      return std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(u) ^
                                        (static_cast<std::uint64_t>(u >> 64) * 0x9E3779B97F4A7C15ULL));
    } else {
      return std::hash<std::string>{}(k.str());
    }
  }
};

template <typename K>
double zero_mode_of_product(const std::vector<Complex>& b, int dm, const std::vector<K>& freqs,
                            std::size_t& largest) {
  using Series = std::unordered_map<K, Complex, KeyHash<K>>;
  Series acc{{K(0), Complex(1.0)}};
  largest = 1;
  for (const K& a : freqs) {
    Series next;
    next.reserve(acc.size() * (2 * dm + 1));
    for (const auto& [f, c] : acc) {
      for (int j = -dm; j <= dm; ++j) {
        const Complex bj = b[j + dm];
        if (bj == Complex(0.0)) continue;
        next[f + K(j) * a] += c * bj;
      }
    }
    acc.swap(next);
    largest = std::max(largest, acc.size());
  }
  const auto it = acc.find(K(0));
  return it == acc.end() ? 0.0 : it->second.real();
}

}  // namespace

int max_enumerable_n(long m) {
  int n = 0;
  while (n < kMaxEnumerationLength && ipow(2 * m + 1, (n + 2) / 2) <= kHalfSumBudget) ++n;
  return n;
}

SolutionCount count_solutions(std::span<const BigInt> sequence, long m, std::optional<std::pair<int, int>> window) {
  if (m < 1) throw ArgumentError("count_solutions: m must be at least 1");
  const std::span<const BigInt> a = apply_window(sequence, window);
  const int n = static_cast<int>(a.size());
  if (n > kMaxEnumerationLength || ipow(2 * m + 1, (n + 1) / 2) > kHalfSumBudget) {
    throw BudgetError("count_solutions: n = " + std::to_string(n) + " exceeds the enumeration budget for m = " +
                      std::to_string(m) + "; largest feasible n is " + std::to_string(max_enumerable_n(m)));
  }
  SolutionCount out;
  out.n = n;
  out.m = m;
  out.sequence.assign(a.begin(), a.end());
  out.method = "meet_in_the_middle";
  if (fits_i128(a, m)) {
    std::vector<i128> v;
    for (const BigInt& x : a) v.push_back(to_i128(x));
    out.total = meet_in_the_middle<i128>(v, m);
  } else {
    out.total = meet_in_the_middle<BigInt>(a, m);
  }
  out.nontrivial = out.total - 1;
  return out;
}

SolutionCount count_solutions_pruned(std::span<const BigInt> sequence, long m, std::uint64_t max_nodes) {
  if (m < 1) throw ArgumentError("count_solutions_pruned: m must be at least 1");
  SolutionCount out;
  out.n = static_cast<int>(sequence.size());
  out.m = m;
  out.sequence.assign(sequence.begin(), sequence.end());
  out.method = "pruned_search";
  std::vector<BigInt> desc(sequence.begin(), sequence.end());
  std::sort(desc.begin(), desc.end(), [](const BigInt& x, const BigInt& y) { return abs(x) > abs(y); });
  if (fits_i128(sequence, m)) {
    std::vector<i128> v;
    for (const BigInt& x : desc) v.push_back(to_i128(x));
    out.total = pruned_count<i128>(std::move(v), m, max_nodes);
  } else {
    out.total = pruned_count<BigInt>(std::move(desc), m, max_nodes);
  }
  out.nontrivial = out.total - 1;
  return out;
}

bool lemma_lower_bound(std::span<const BigInt> sequence, long m, long d, int k_start, int k_end) {
  BigInt prefix = 0;
  for (int l = k_start; l <= k_end; ++l) {
    const BigInt& a = sequence[l - 1];
    if (a - BigInt(d) * m * prefix <= 0) return false;
    prefix += a;
  }
  return true;
}

GapCondition verify_gap_condition(std::span<const BigInt> sequence, long m, long d) {
  if (m < 0 || d < 0) throw ArgumentError("verify_gap_condition: m and d must be non-negative");
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    if (sequence[i] <= sequence[i - 1]) throw ArgumentError("verify_gap_condition: sequence must be increasing");
  }
  GapCondition out;
  const int n = static_cast<int>(sequence.size());
  const BigInt factor = BigInt(m) * d + 1;
  // Ratio j is a_{j+1}/a_j, j = 1..n-1. k_0 is one past the last failing j,
  // or 0 when none fails.
  int last_fail = 0;
  for (int j = 1; j < n; ++j) {
    if (sequence[j] < factor * sequence[j - 1]) last_fail = j;
  }
  if (n >= 2 && last_fail == n - 1) return out;
  out.k0 = last_fail == 0 ? 0 : last_fail + 1;
  const int lo = *out.k0 + 1;
  out.lower_bound_holds = lemma_lower_bound(sequence, m, d, lo, n);
  const long bound = m * d;
  if (bound == 0 || lo > n) {
    // Only the zero tuple is admissible.
    out.certified = true;
    return out;
  }
  try {
    out.count = count_solutions(sequence, bound, std::make_pair(lo, n));
  } catch (const BudgetError&) {
    out.count = count_solutions_pruned(sequence.subspan(lo - 1), bound);
  }
  out.certified = out.count->nontrivial == 0;
  return out;
}

std::vector<Complex> lemma_coefficients(const TrigPolynomial& trig, double theta, int d) {
  if (d < 0) throw ArgumentError("lemma_coefficients: d must be non-negative");
  const int m = trig.degree();
  const int dm = d * m;
  std::vector<Complex> b(2 * dm + 1, Complex(0.0));
  // power holds the coefficients of (theta f)^k / k!, indices -km..km.
  std::vector<Complex> power{Complex(1.0)};
  b[dm] += 1.0;
  for (int k = 1; k <= d; ++k) {
    const int prev = (k - 1) * m;
    std::vector<Complex> next(2 * k * m + 1, Complex(0.0));
    for (int i = -prev; i <= prev; ++i) {
      const Complex p = power[i + prev];
      if (p == Complex(0.0)) continue;
      for (int j = -m; j <= m; ++j) next[i + j + k * m] += p * trig.coefficient(j) * (theta / k);
    }
    power.swap(next);
    for (int i = -k * m; i <= k * m; ++i) b[i + dm] += power[i + k * m];
  }
  return b;
}

double lemma_b0(const TrigPolynomial& trig, double theta, int d) {
  return lemma_coefficients(trig, theta, d)[static_cast<std::size_t>(d) * trig.degree()].real();
}

ProductIntegral product_integral_exact(const TrigPolynomial& trig, const GapSequence& seq, double theta, int d,
                                       int k0, int n) {
  if (d < 0) throw ArgumentError("product_integral_exact: d must be non-negative");
  if (k0 < 0 || n < k0) throw ArgumentError("product_integral_exact: need 0 <= k_0 <= n");
  const int m = trig.degree();
  const std::vector<BigInt> terms = seq.terms(n);
  const GapCondition gap = verify_gap_condition(terms, m, d);
  if (!gap.k0 || *gap.k0 > k0 || !gap.certified) {
    throw RefusalError("product_integral_exact: gap condition a_{k+1} >= (md+1) a_k does not certify k_0 = " +
                       std::to_string(k0) + " for m = " + std::to_string(m) + ", d = " + std::to_string(d));
  }
  const int factors = n - k0;
  const std::uint64_t support = ipow(2 * static_cast<std::uint64_t>(d) * m + 1, factors);
  if (support > kProductModeBudget) {
    throw BudgetError("product_integral_exact: up to " + std::to_string(support) + " Fourier modes exceed the budget of " +
                      std::to_string(kProductModeBudget));
  }
  const std::vector<Complex> b = lemma_coefficients(trig, theta, d);
  ProductIntegral out;
  const double b0 = b[static_cast<std::size_t>(d) * m].real();
  out.rhs = std::pow(b0, factors);
  const std::span<const BigInt> window(terms.data() + k0, factors);
  if (fits_i128(window, static_cast<long>(d) * m + 1)) {
    std::vector<i128> freqs;
    for (const BigInt& a : window) freqs.push_back(to_i128(a));
    out.lhs = zero_mode_of_product<i128>(b, d * m, freqs, out.modes);
  } else {
    const std::vector<BigInt> freqs(window.begin(), window.end());
    out.lhs = zero_mode_of_product<BigInt>(b, d * m, freqs, out.modes);
  }
  return out;
}

B0Limit b0_limit_check(const TrigPolynomial& trig, double theta, std::span<const int> d_list) {
  for (std::size_t i = 1; i < d_list.size(); ++i) {
    if (d_list[i] <= d_list[i - 1]) throw ArgumentError("b0_limit_check: d_list must be increasing");
  }
  B0Limit out;
  out.limit = std::exp(cgf_iid(PeriodicFunctionSpec::trig(trig), theta).value);
  const double floor = 4 * std::numeric_limits<double>::epsilon() * out.limit;
  std::size_t last_increase = 0;
  for (std::size_t i = 0; i < d_list.size(); ++i) {
    const double b0 = lemma_b0(trig, theta, d_list[i]);
    out.d.push_back(d_list[i]);
    out.b0.push_back(b0);
    out.gap.push_back(std::abs(b0 - out.limit));
    if (i > 0 && std::max(out.gap[i], floor) > std::max(out.gap[i - 1], floor)) last_increase = i;
  }
  out.eventually_monotone = d_list.size() < 2 || d_list.size() - last_increase >= 2;
  return out;
}

}  // namespace lacldp
