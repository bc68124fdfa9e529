#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lacldp/fnmodel.hpp"
#include "lacldp/gap_sequence.hpp"

namespace lacldp {

// Default Monte-Carlo seed.
inline constexpr std::uint64_t kDefaultSeed = 0x1AC0;

// S_n(omega) = sum_{k=1}^n f(a_k omega). The products a_k omega are reduced
// modulo 1 in exact integer arithmetic (omega is a dyadic rational).
double lacunary_sum(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n, double omega);

enum class MgfMethod { exact_quadrature, monte_carlo };
std::string to_string(MgfMethod method);

struct MgfRecord {
  int n = 0;
  double theta = 0.0;
  double value = 1.0;  // E[exp(theta S_n)]
  MgfMethod method = MgfMethod::exact_quadrature;
  double error_estimate = 0.0;
  // log(value), computed with an exponent shift so it stays finite when
  // value itself would overflow.
  double log_value = 0.0;
};

struct ExactMgfOptions {
  int panels_per_period = 8;  // of the fastest term a_n
  long long max_panels = 1LL << 22;
};

// Composite 8-point Gauss-Legendre quadrature with panel width
// 1/(panels_per_period * a_n). The error estimate is the difference to a
// run at half the panel density. Throws BudgetError (naming the largest
// feasible n) when the panel count exceeds the budget.
MgfRecord exact_mgf(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n, double theta,
                    const ExactMgfOptions& options = {});

// Largest n with panels_per_period * a_n <= max_panels.
int max_exact_n(const GapSequence& seq, const ExactMgfOptions& options = {});

// Sample mean of exp(theta S_n(U)) over uniform U. Samples are drawn in
// fixed batches, each with its own generator seeded from (seed, batch), so
// results are reproducible for a given (seed, samples).
MgfRecord mc_mgf(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n, double theta,
                 std::uint64_t samples, std::uint64_t seed = kDefaultSeed);

struct ScaledCgfEntry {
  int n = 0;
  double value = 0.0;  // (1/n) log E[exp(theta S_n)]
  MgfRecord mgf;
};

struct Extrapolation {
  double limit = 0.0;     // c_0 in c_0 + c_1/n
  double slope = 0.0;     // c_1
  double residual = 0.0;  // max abs residual of the fit
};

// Least-squares fit of c_0 + c_1/n to the last three points.
Extrapolation richardson_in_inverse_n(std::span<const int> n, std::span<const double> values);

struct ScaledCgfSequence {
  std::vector<ScaledCgfEntry> entries;
  std::optional<Extrapolation> extrapolation;  // when at least three entries
};

struct ScaledCgfOptions {
  MgfMethod method = MgfMethod::exact_quadrature;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = kDefaultSeed;
  ExactMgfOptions exact;
};

ScaledCgfSequence scaled_cgf_sequence(const PeriodicFunctionSpec& spec, const GapSequence& seq,
                                      double theta, std::span<const int> n_list,
                                      const ScaledCgfOptions& options = {});

struct TailEstimate {
  double probability = 0.0;   // point estimate (hits / samples)
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  // No hits: only the one-sided bound wilson_high is meaningful.
  bool one_sided = false;
  // -(1/n) log(probability); for one-sided results, the lower bound
  // -(1/n) log(wilson_high).
  double rate = 0.0;
};

// Monte-Carlo estimate of P[S_n/n >= t] with a Wilson score interval.
TailEstimate tail_probability(const PeriodicFunctionSpec& spec, const GapSequence& seq, int n, double t,
                              std::uint64_t samples, std::uint64_t seed = kDefaultSeed, double z = 1.96);

}  // namespace lacldp
