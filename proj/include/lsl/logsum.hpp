#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsl/exact.hpp"
#include "lsl/kernels.hpp"
#include "lsl/multiplicative.hpp"

namespace lsl::logsum {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;
// Exact mode is refused above this x.
inline constexpr std::uint64_t kExactLimit = 100'000;

enum class Mode { ExactRational, CompensatedFloat };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

// The four partial sums at x:
//   S = sum f(n)/n, T = sum f(n), G = sum (1*f)(n) = sum f(d) floor(x/d),
//   Phi = sum f(n) {x/n},   with x*S = G + Phi.
// Exact mode fills the rational fields and sets the doubles to their rounded
// values; compensated mode fills only the doubles plus float_error_bound,
// which bounds |x*S - G - Phi| as evaluated in double.
struct SumLedger {
  std::uint64_t x = 0;
  Mode mode = Mode::CompensatedFloat;
  Rational S_exact, T_exact, G_exact, Phi_exact;
  double S = 0, T = 0, G = 0, Phi = 0;
  double float_error_bound = 0;
  // Individual certified bounds for S and Phi in compensated mode.
  double S_error = 0, Phi_error = 0, G_error = 0, T_error = 0;

  bool identity_holds() const;
};

struct LedgerOptions {
  unsigned workers = 1;
  kernels::Isa isa = kernels::active_isa();
};

SumLedger compute_ledger(const MultiplicativeSpec& spec, std::uint64_t x, Mode mode, const LedgerOptions& options = {});
// Same, from an already sieved table covering x.
SumLedger compute_ledger(const ValueTable& values, std::uint64_t x, Mode mode, const LedgerOptions& options = {});

struct DecompositionReport {
  SumLedger ledger;
  double euler_gamma = kEulerGamma;
  double residual = 0;             // S - G/x - (1 - gamma) T / x
  double normalized_residual = 0;  // |residual| * (log x)^(1/5)
};

DecompositionReport decomposition_report(const SumLedger& ledger);

// Columns: x, S, T, G, Phi, residual, normalized_residual, mode, error_bound
std::string csv_header();
std::string csv_row(const SumLedger& ledger);

// g = 1*f for n <= limit by accumulating f(d) over the multiples of d.
// g[0] is 0.
inline constexpr std::uint64_t kDivisorTableLimit = 10'000'000;
std::vector<double> divisor_sum_table(const MultiplicativeSpec& spec, std::uint64_t limit);
std::vector<double> divisor_sum_table(const ValueTable& values);

// Exact sum over z-smooth n <= x of g(n)/n, g = 1*f, by enumerating the
// z-smooth integers.
inline constexpr std::uint64_t kSmoothEnumerationBudget = 5'000'000;
Rational smooth_restricted_logsum(const MultiplicativeSpec& spec, std::uint64_t x, std::uint64_t z,
                                  std::uint64_t budget = kSmoothEnumerationBudget);

// Checks x*S(x) = G(x) + Phi(x) in exact integer arithmetic over the common
// denominator lcm(1..x_max) for every x in [1, x_max]. Integral classes only.
struct IdentitySweep {
  std::uint64_t checked = 0;
  std::vector<std::uint64_t> failures;
};
IdentitySweep exact_identity_sweep(const ValueTable& values, std::uint64_t x_max);

// Verifies S(x) > 0 for every x <= x_max with a segmented sieve and
// compensated prefix sums. certified means min_value - error_bound > 0.
struct PositivityScan {
  std::uint64_t x_max = 0;
  double min_value = 0;
  std::uint64_t argmin_x = 0;
  double error_bound = 0;
  double certified_margin = 0;  // min over x of (computed S(x) - its bound)
  bool certified = false;
  double final_value = 0;
  std::optional<std::uint64_t> first_nonpositive;
  std::uint64_t segments = 0;
};

struct ScanOptions {
  std::uint64_t segment_size = std::uint64_t(1) << 20;
  unsigned workers = 1;
};

PositivityScan positivity_scan(const MultiplicativeSpec& spec, std::uint64_t x_max, const ScanOptions& options = {});

}  // namespace lsl::logsum
