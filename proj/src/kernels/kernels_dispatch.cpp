#include <atomic>
#include <cstdlib>
#include <cstring>

#include "lsl/kernels.hpp"

namespace lsl::kernels {

namespace {
std::atomic<int> g_override{-1};
}

double neumaier_bound(double abs_sum, std::uint64_t terms) {
  constexpr double u = kUnitRoundoff;
  // u per rounded term, 2u|s| + 4 n u^2 sum|t| per lane, and the same again
  // for the lane reduction; |s| <= sum|t|.
  const double n = double(terms) + 64.0;
  return (5.0 * u + 4.0 * n * u * u) * abs_sum * (1.0 + 0x1p-40);
}

CompensatedSum merge(const CompensatedSum& a, const CompensatedSum& b) {
  CompensatedSum r;
  r.value = a.value + b.value;
  r.abs_sum = a.abs_sum + b.abs_sum;
  r.terms = a.terms + b.terms;
  r.error = (a.error + b.error + kUnitRoundoff * std::abs(r.value)) * (1.0 + 0x1p-40);
  return r;
}

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(LSL_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  const int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<Isa>(o);
  static const Isa detected = [] {
    const char* env = std::getenv("LSL_KERNEL");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return detected;
}

void set_isa_override(Isa isa) { g_override.store(isa_available(isa) ? int(isa) : int(Isa::Scalar)); }
void clear_isa_override() { g_override.store(-1); }

CompensatedSum reciprocal_sum(std::span<const std::int8_t> v, std::uint64_t first, Isa isa) {
#if defined(LSL_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(isa)) return avx2::reciprocal_sum(v, first);
#endif
  (void)isa;
  return scalar::reciprocal_sum(v, first);
}

CompensatedSum fracpart_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x, Isa isa) {
#if defined(LSL_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(isa)) return avx2::fracpart_sum(v, first, x);
#endif
  (void)isa;
  return scalar::fracpart_sum(v, first, x);
}

std::int64_t floor_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x, Isa isa) {
#if defined(LSL_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(isa)) return avx2::floor_sum(v, first, x);
#endif
  (void)isa;
  return scalar::floor_sum(v, first, x);
}

std::int64_t signed_sum(std::span<const std::int8_t> v, Isa isa) {
#if defined(LSL_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(isa)) return avx2::signed_sum(v);
#endif
  (void)isa;
  return scalar::signed_sum(v);
}

}  // namespace lsl::kernels
