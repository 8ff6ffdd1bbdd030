#pragma once

#include <cstdint>
#include <optional>

#include "lsl/exact.hpp"
#include "lsl/multiplicative.hpp"

namespace lsl::randmult {

// Random completely multiplicative f: each prime gets an independent fair
// sign that depends only on (seed, p).
struct RandomModel {
  std::uint64_t seed = 0;
  std::uint64_t limit = 0;
};

std::uint64_t mix64(std::uint64_t a, std::uint64_t b);
int prime_sign(std::uint64_t seed, std::uint64_t p);

SignVector sample_sign_vector(const RandomModel& model);

// 99% two-sided
inline constexpr double kWilsonZ99 = 2.5758293035489004;

struct Interval {
  double lo = 0;
  double hi = 0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = kWilsonZ99);

struct TailEstimate {
  std::uint64_t x = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0;
  Interval wilson;
};

// P(S_f(x) < 0). Sums whose sign is not certified in floating point are
// settled exactly.
TailEstimate negativity_probability_mc(std::uint64_t x, std::uint64_t trials, std::uint64_t seed, unsigned workers = 1);

// (number of sign vectors with S_f(x) < 0) / 2^pi(x)
Rational negativity_probability_exact(std::uint64_t x, unsigned workers = 1);

// Number of q-tuples in [1,x]^q whose product is a perfect square, i.e.
// E[(sum_{n<=x} f(n))^q]. Uses squarefree-kernel class sizes.
std::uint64_t exact_even_moment(std::uint64_t x, unsigned q);

inline constexpr std::uint64_t kMomentBudget = 20'000'000;

enum class MomentWeight { Unit, FracPart };

struct MomentReport {
  std::uint64_t x = 0;
  unsigned q = 0;
  MomentWeight weight = MomentWeight::Unit;
  std::optional<std::uint64_t> exact_value;
  double empirical_value = 0;
  double standard_error = 0;
  std::optional<double> relative_deviation;
  std::uint64_t trials = 0;
};

// Sample mean of (sum f(n))^q, or of (sum f(n){x/n})^q for FracPart.
MomentReport empirical_moment(std::uint64_t x, unsigned q, std::uint64_t trials, std::uint64_t seed,
                              unsigned workers = 1, MomentWeight weight = MomentWeight::Unit);

struct PrimeTailReport {
  std::uint64_t x = 0;
  double threshold = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double empirical = 0;
  double hoeffding_bound = 0;  // exp(-t^2 / (2 pi(x)))
};

// P(sum_{p<=x} f(p) <= -t)
PrimeTailReport prime_sum_tail(std::uint64_t x, double t, std::uint64_t trials, std::uint64_t seed, unsigned workers = 1);

// P(|sum_{n<=x} f(n){x/n}| >= M x / log x)
TailEstimate fracpart_tail_mc(std::uint64_t x, double M, std::uint64_t trials, std::uint64_t seed, unsigned workers = 1);

}  // namespace lsl::randmult
