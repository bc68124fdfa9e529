#include "lacldp/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lacldp/errors.hpp"
#include "lacldp/parallel.hpp"
#include "lacldp/quadrature.hpp"

namespace lacldp {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kBatch = 1 << 16;
constexpr long long kPanelBlock = 1 << 12;

void require_n(const GapSequence& seq, int n, const char* who) {
  if (n < 1) throw ArgumentError(std::string(who) + ": n must be at least 1");
  if (n > seq.available()) {
    throw ArgumentError(std::string(who) + ": sequence has only " + std::to_string(seq.available()) + " terms");
  }
}

// Exponent shift keeping exp(theta S_n - shift) <= ~1 given the value range.
double exponent_shift(const PeriodicFunctionSpec& spec, int n, double theta) {
  if (theta == 0.0) return 0.0;
  const ValueRange r = value_range(spec);
  return theta * n * (theta > 0 ? r.max : r.min);
}

// Low 128 bits of each a_k.
std::vector<u128> low_words(const std::vector<BigInt>& a) {
  std::vector<u128> out;
  out.reserve(a.size());
  const BigInt mask = (BigInt(1) << 128) - 1;
  for (const BigInt& v : a) {
    const BigInt low = v & mask;
    const auto hi = static_cast<std::uint64_t>(low >> 64);
    const auto lo = static_cast<std::uint64_t>(low & std::numeric_limits<std::uint64_t>::max());
    out.push_back((static_cast<u128>(hi) << 64) | lo);
  }
  return out;
}

// Draws S_n(U) for a batch of uniform U. When every a_k fits in 64 bits, U
// carries 128 random bits and a_k U mod 1 is read off the top 64 bits of the
// wrapped 128-bit product. Larger a_k use a multiword U with 64 bits beyond
// the size of a_n.
class SumSampler {
 public:
  SumSampler(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n) : spec_(spec) {
    terms_ = seq.terms(n);
    const std::size_t bits = boost::multiprecision::msb(terms_.back()) + 1;
    small_ = bits <= 64;
    if (small_) {
      low_ = low_words(terms_);
    } else {
      words_ = (bits + 64 + 63) / 64;
    }
  }

  void draw(std::uint64_t seed, std::uint64_t batch, std::uint64_t count, std::vector<double>& out) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
    std::mt19937_64 rng(seq);
    out.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      double s = 0.0;
      if (small_) {
        const u128 u = (static_cast<u128>(rng()) << 64) | rng();
        for (const u128 a : low_) {
          const auto top = static_cast<std::uint64_t>((a * u) >> 64);
          s += spec_(std::ldexp(static_cast<double>(top), -64));
        }
      } else {
        BigInt u = 0;
        for (std::size_t w = 0; w < words_; ++w) u = (u << 64) | BigInt(rng());
        const unsigned total = static_cast<unsigned>(64 * words_);
        const BigInt mask = (BigInt(1) << total) - 1;
        for (const BigInt& a : terms_) {
          const BigInt r = (a * u) & mask;
          const auto top = static_cast<std::uint64_t>(r >> (total - 64));
          s += spec_(std::ldexp(static_cast<double>(top), -64));
        }
      }
      out[i] = s;
    }
  }

 private:
  const PeriodicFunctionSpec& spec_;
  std::vector<BigInt> terms_;
  std::vector<u128> low_;
  std::size_t words_ = 0;
  bool small_ = true;
};

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
};

Moments combine(const Moments& a, const Moments& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  Moments out;
  out.count = a.count + b.count;
  const double delta = b.mean - a.mean;
  out.mean = a.mean + delta * b.count / out.count;
  out.m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / out.count;
  return out;
}

std::uint64_t batch_size(std::uint64_t samples, std::uint64_t b) {
  return std::min<std::uint64_t>(kBatch, samples - b * kBatch);
}

// Composite Gauss-Legendre quadrature of exp(theta S_n - shift) on `panels`
// equal panels. Node (p + t)/panels is reduced as ((a_k p) mod panels + a_k t)/panels.
double panel_quadrature(const PeriodicFunctionSpec& spec, const std::vector<std::int64_t>& a, double theta,
                        double shift, long long panels) {
  const UnitRule& rule = gauss_legendre8();
  const long long blocks = (panels + kPanelBlock - 1) / kPanelBlock;
  std::vector<double> block_sums(blocks);
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
    const long long first = static_cast<long long>(b) * kPanelBlock;
    const long long last = std::min(panels, first + kPanelBlock);
    std::vector<double> panel_sums(last - first);
    std::vector<std::int64_t> residue(a.size());
    for (long long p = first; p < last; ++p) {
      for (std::size_t k = 0; k < a.size(); ++k) residue[k] = (a[k] * p) % panels;
      double acc = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double t = rule.nodes[j];
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
          s += spec((static_cast<double>(residue[k]) + static_cast<double>(a[k]) * t) / static_cast<double>(panels));
        }
        acc += rule.weights[j] * std::exp(theta * s - shift);
      }
      panel_sums[p - first] = acc;
    }
    block_sums[b] = pairwise_sum(panel_sums);
  });
  return pairwise_sum(block_sums) / static_cast<double>(panels);
}

}  // namespace

std::string to_string(MgfMethod method) {
  return method == MgfMethod::exact_quadrature ? "exact_quadrature" : "monte_carlo";
}

double lacunary_sum(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n, double omega) {
  require_n(seq, n, "lacunary_sum");
  if (!std::isfinite(omega)) throw ArgumentError("lacunary_sum: omega must be finite");
  // omega = m 2^e with integer m.
  int e = 0;
  const double mant = std::frexp(omega, &e);
  const auto m = static_cast<long long>(std::ldexp(mant, 53));
  e -= 53;
  double s = 0.0;
  for (const BigInt& a : seq.terms(n)) {
    double frac = 0.0;
    if (e < 0) {
      const BigInt prod = a * m;
      const BigInt modulus = BigInt(1) << (-e);
      BigInt r = prod % modulus;
      if (r < 0) r += modulus;
      // r < 2^-e; scale down before converting so large r keeps its top bits.
      const std::size_t bits = r == 0 ? 0 : boost::multiprecision::msb(r) + 1;
      if (bits > 64) {
        const unsigned drop = static_cast<unsigned>(bits - 64);
        frac = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(r >> drop)), static_cast<int>(drop) + e);
      } else {
        frac = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(r)), e);
      }
    }
    s += spec(frac);
  }
  return s;
}

int max_exact_n(const GapSequence& seq, const ExactMgfOptions& options) {
  const BigInt cap = options.max_panels / options.panels_per_period;
  int n = 0;
  const int limit = std::min(seq.available(), 64);
  const std::vector<BigInt> a = seq.terms(limit);
  while (n < limit && a[n] <= cap) ++n;
  return n;
}

MgfRecord exact_mgf(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n, double theta,
                    const ExactMgfOptions& options) {
  require_n(seq, n, "exact_mgf");
  if (options.panels_per_period < 2 || options.panels_per_period % 2 != 0) {
    throw ArgumentError("exact_mgf: panels_per_period must be even and at least 2");
  }
  const std::vector<BigInt> terms = seq.terms(n);
  const BigInt needed = terms.back() * options.panels_per_period;
  if (needed > options.max_panels) {
    throw BudgetError("exact_mgf: " + needed.str() + " panels exceed the budget of " +
                      std::to_string(options.max_panels) + "; largest feasible n is " +
                      std::to_string(max_exact_n(seq, options)));
  }
  MgfRecord rec;
  rec.n = n;
  rec.theta = theta;
  rec.method = MgfMethod::exact_quadrature;
  if (theta == 0.0) return rec;

  std::vector<std::int64_t> a;
  for (const BigInt& t : terms) a.push_back(static_cast<std::int64_t>(t));
  const double shift = exponent_shift(spec, n, theta);
  const long long panels = static_cast<long long>(needed);
  const double fine = panel_quadrature(spec, a, theta, shift, panels);
  const double coarse = panel_quadrature(spec, a, theta, shift, panels / 2);
  rec.log_value = shift + std::log(fine);
  rec.value = std::exp(rec.log_value);
  rec.error_estimate = std::abs(fine - coarse) * std::exp(shift);
  return rec;
}

MgfRecord mc_mgf(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n, double theta,
                 std::uint64_t samples, std::uint64_t seed) {
  require_n(seq, n, "mc_mgf");
  if (samples < 1) throw ArgumentError("mc_mgf: samples must be at least 1");
  const SumSampler sampler(spec, seq, n);
  const double shift = exponent_shift(spec, n, theta);
  const std::uint64_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<Moments> parts(batches);
  parallel_for(batches, [&](std::size_t b) {
    std::vector<double> s;
    sampler.draw(seed, b, batch_size(samples, b), s);
    Moments m;
    for (const double v : s) {
      const double x = std::exp(theta * v - shift);
      m.count += 1.0;
      const double delta = x - m.mean;
      m.mean += delta / m.count;
      m.m2 += delta * (x - m.mean);
    }
    parts[b] = m;
  });
  Moments total;
  for (const Moments& m : parts) total = combine(total, m);
  MgfRecord rec;
  rec.n = n;
  rec.theta = theta;
  rec.method = MgfMethod::monte_carlo;
  const double scale = std::exp(shift);
  rec.log_value = shift + std::log(total.mean);
  rec.value = theta == 0.0 ? total.mean : std::exp(rec.log_value);
  const double variance = total.count > 1 ? total.m2 / (total.count - 1) : 0.0;
  rec.error_estimate = std::sqrt(variance / total.count) * scale;
  return rec;
}

Extrapolation richardson_in_inverse_n(std::span<const int> n, std::span<const double> values) {
  if (n.size() != values.size() || n.size() < 3) {
    throw ArgumentError("richardson_in_inverse_n: need at least three (n, value) pairs");
  }
  const std::size_t first = n.size() - 3;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < n.size(); ++i) {
    const double x = 1.0 / n[i];
    sx += x;
    sy += values[i];
    sxx += x * x;
    sxy += x * values[i];
  }
  const double det = 3 * sxx - sx * sx;
  if (det == 0.0) throw ArgumentError("richardson_in_inverse_n: n values must be distinct");
  Extrapolation out;
  out.slope = (3 * sxy - sx * sy) / det;
  out.limit = (sy - out.slope * sx) / 3;
  for (std::size_t i = first; i < n.size(); ++i) {
    out.residual = std::max(out.residual, std::abs(values[i] - out.limit - out.slope / n[i]));
  }
  return out;
}

ScaledCgfSequence scaled_cgf_sequence(const PeriodicFunctionSpec& spec, const GapSequence& seq, double theta,
                                      std::span<const int> n_list, const ScaledCgfOptions& options) {
  ScaledCgfSequence out;
  for (const int n : n_list) {
    ScaledCgfEntry e;
    e.n = n;
    e.mgf = options.method == MgfMethod::exact_quadrature
                ? exact_mgf(spec, seq, n, theta, options.exact)
                : mc_mgf(spec, seq, n, theta, options.samples, options.seed);
    e.value = e.mgf.log_value / n;
    out.entries.push_back(e);
  }
  if (out.entries.size() >= 3) {
    std::vector<int> ns;
    std::vector<double> vs;
    for (const auto& e : out.entries) {
      ns.push_back(e.n);
      vs.push_back(e.value);
    }
    out.extrapolation = richardson_in_inverse_n(ns, vs);
  }
  return out;
}

TailEstimate tail_probability(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n, double t,
                              std::uint64_t samples, std::uint64_t seed, double z) {
  require_n(seq, n, "tail_probability");
  if (samples < 1) throw ArgumentError("tail_probability: samples must be at least 1");
  TailEstimate out;
  out.samples = samples;
  const ValueRange range = value_range(spec);
  if (t <= range.min - range.slack) {
    out.probability = out.wilson_low = out.wilson_high = 1.0;
    out.hits = samples;
    return out;
  }
  if (t > range.max + range.slack) {
    out.one_sided = true;
    out.rate = std::numeric_limits<double>::infinity();
    return out;
  }
  const SumSampler sampler(spec, seq, n);
  const std::uint64_t batches = (samples + kBatch - 1) / kBatch;
  std::vector<std::uint64_t> hits(batches);
  const double threshold = t * n;
  parallel_for(batches, [&](std::size_t b) {
    std::vector<double> s;
    sampler.draw(seed, b, batch_size(samples, b), s);
    hits[b] = static_cast<std::uint64_t>(std::count_if(s.begin(), s.end(), [&](double v) { return v >= threshold; }));
  });
  for (const auto h : hits) out.hits += h;
  const double N = static_cast<double>(samples);
  const double p = out.hits / N;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / N;
  const double center = (p + z2 / (2 * N)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / N + z2 / (4 * N * N)) / denom;
  out.probability = p;
  out.wilson_low = std::max(0.0, center - half);
  out.wilson_high = std::min(1.0, center + half);
  out.one_sided = out.hits == 0;
  out.rate = out.one_sided ? -std::log(out.wilson_high) / n : -std::log(p) / n;
  return out;
}

}  // namespace lacldp
