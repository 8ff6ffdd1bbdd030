#pragma once

// Inner-loop kernels over sign-coded value tables. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant; the variant is
// picked at runtime from CPU features. Requires first + len < 2^52 and
// x < 2^52 so every integer involved is exact in a double.

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

namespace lsl::kernels {

inline constexpr double kUnitRoundoff = 0x1p-53;

// Neumaier-compensated floating sum with a certified error bound
// |value - sum of exact terms| <= error.
struct CompensatedSum {
  double value = 0.0;
  double abs_sum = 0.0;
  std::uint64_t terms = 0;
  double error = 0.0;
};

// value_a + value_b with the rounding of the final addition added to the bound.
CompensatedSum merge(const CompensatedSum& a, const CompensatedSum& b);
// Bound for a Neumaier sum of `terms` once-rounded terms with sum of
// magnitudes abs_sum, including an up-to-8-lane reduction.
double neumaier_bound(double abs_sum, std::uint64_t terms);

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa);
// Best available ISA unless overridden (or LSL_KERNEL=scalar in the environment).
Isa active_isa();
void set_isa_override(Isa isa);
void clear_isa_override();

// sum v[i] / (first + i)
CompensatedSum reciprocal_sum(std::span<const std::int8_t> v, std::uint64_t first, Isa isa = active_isa());
// sum v[i] * (x mod n) / n,   n = first + i
CompensatedSum fracpart_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x,
                            Isa isa = active_isa());
// sum v[i] * floor(x / n), exact
std::int64_t floor_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x, Isa isa = active_isa());
// sum v[i], exact
std::int64_t signed_sum(std::span<const std::int8_t> v, Isa isa = active_isa());

namespace scalar {
CompensatedSum reciprocal_sum(std::span<const std::int8_t> v, std::uint64_t first);
CompensatedSum fracpart_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x);
std::int64_t floor_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x);
std::int64_t signed_sum(std::span<const std::int8_t> v);
}  // namespace scalar

#if defined(LSL_HAVE_AVX2)
namespace avx2 {
CompensatedSum reciprocal_sum(std::span<const std::int8_t> v, std::uint64_t first);
CompensatedSum fracpart_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x);
std::int64_t floor_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x);
std::int64_t signed_sum(std::span<const std::int8_t> v);
}  // namespace avx2
#endif

// Running Neumaier accumulator for sequential scans that need every prefix.
class Neumaier {
 public:
  void add(double t) {
    const double s = sum_ + t;
    if (std::abs(sum_) >= std::abs(t))
      comp_ += (sum_ - s) + t;
    else
      comp_ += (t - s) + sum_;
    sum_ = s;
    abs_ += std::abs(t);
    ++terms_;
  }
  double value() const { return sum_ + comp_; }
  double abs_sum() const { return abs_; }
  std::uint64_t terms() const { return terms_; }
  CompensatedSum result() const {
    return {value(), abs_, terms_, neumaier_bound(abs_, terms_)};
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double abs_ = 0.0;
  std::uint64_t terms_ = 0;
};

}  // namespace lsl::kernels
