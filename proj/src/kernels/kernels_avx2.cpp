// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cstring>

#include "lsl/kernels.hpp"

namespace lsl::kernels::avx2 {

namespace {

inline __m256d load4_codes(const std::int8_t* p) {
  std::int32_t raw;
  std::memcpy(&raw, p, 4);
  return _mm256_cvtepi32_pd(_mm_cvtepi8_epi32(_mm_cvtsi32_si128(raw)));
}

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// One Neumaier step per lane.
inline void neumaier(__m256d& s, __m256d& c, __m256d t) {
  const __m256d sn = _mm256_add_pd(s, t);
  const __m256d ge = _mm256_cmp_pd(abs_pd(s), abs_pd(t), _CMP_GE_OQ);
  const __m256d big = _mm256_blendv_pd(t, s, ge);
  const __m256d small = _mm256_blendv_pd(s, t, ge);
  c = _mm256_add_pd(c, _mm256_add_pd(_mm256_sub_pd(big, sn), small));
  s = sn;
}

struct Lanes {
  __m256d s0 = _mm256_setzero_pd(), c0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd(), c1 = _mm256_setzero_pd();
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();

  CompensatedSum finish(Neumaier& tail, std::uint64_t terms) const {
    alignas(32) double buf[4];
    Neumaier red;
    for (const __m256d* v : {&s0, &s1, &c0, &c1}) {
      _mm256_store_pd(buf, *v);
      for (double d : buf) red.add(d);
    }
    red.add(tail.value());
    double abs_sum = tail.abs_sum();
    _mm256_store_pd(buf, _mm256_add_pd(a0, a1));
    for (double d : buf) abs_sum += d;
    abs_sum *= 1.0 + 0x1p-40;
    return {red.value(), abs_sum, terms, neumaier_bound(abs_sum, terms)};
  }
};

}  // namespace

CompensatedSum reciprocal_sum(std::span<const std::int8_t> v, std::uint64_t first) {
  Lanes L;
  const std::size_t len = v.size();
  std::size_t i = 0;
  __m256d n = _mm256_add_pd(_mm256_set1_pd(double(first)), _mm256_setr_pd(0, 1, 2, 3));
  const __m256d four = _mm256_set1_pd(4.0), eight = _mm256_set1_pd(8.0);
  for (; i + 8 <= len; i += 8) {
    const __m256d t0 = _mm256_div_pd(load4_codes(v.data() + i), n);
    const __m256d t1 = _mm256_div_pd(load4_codes(v.data() + i + 4), _mm256_add_pd(n, four));
    neumaier(L.s0, L.c0, t0);
    neumaier(L.s1, L.c1, t1);
    L.a0 = _mm256_add_pd(L.a0, abs_pd(t0));
    L.a1 = _mm256_add_pd(L.a1, abs_pd(t1));
    n = _mm256_add_pd(n, eight);
  }
  Neumaier tail;
  for (; i < len; ++i)
    if (v[i] != 0) tail.add(double(v[i]) / double(first + i));
  return L.finish(tail, len);
}

CompensatedSum fracpart_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x) {
  Lanes L;
  const std::size_t len = v.size();
  std::size_t i = 0;
  const __m256d xv = _mm256_set1_pd(double(x));
  __m256d n = _mm256_add_pd(_mm256_set1_pd(double(first)), _mm256_setr_pd(0, 1, 2, 3));
  const __m256d four = _mm256_set1_pd(4.0);
  auto term = [&](__m256d codes, __m256d nn) {
    // floor(x/n) is exact for x < 2^52; x - q*n is then exact
    const __m256d q = _mm256_round_pd(_mm256_div_pd(xv, nn), _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
    const __m256d r = _mm256_fnmadd_pd(q, nn, xv);
    return _mm256_mul_pd(codes, _mm256_div_pd(r, nn));
  };
  for (; i + 8 <= len; i += 8) {
    const __m256d t0 = term(load4_codes(v.data() + i), n);
    const __m256d n1 = _mm256_add_pd(n, four);
    const __m256d t1 = term(load4_codes(v.data() + i + 4), n1);
    neumaier(L.s0, L.c0, t0);
    neumaier(L.s1, L.c1, t1);
    L.a0 = _mm256_add_pd(L.a0, abs_pd(t0));
    L.a1 = _mm256_add_pd(L.a1, abs_pd(t1));
    n = _mm256_add_pd(n1, four);
  }
  Neumaier tail;
  for (; i < len; ++i) {
    if (v[i] == 0) continue;
    const std::uint64_t nn = first + i;
    tail.add(double(v[i]) * (double(x % nn) / double(nn)));
  }
  return L.finish(tail, len);
}

std::int64_t floor_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x) {
  const std::size_t len = v.size();
  std::size_t i = 0;
  const __m256d xv = _mm256_set1_pd(double(x));
  // adding 2^52 places an integer < 2^52 in the low mantissa bits
  const __m256d magic = _mm256_set1_pd(0x1p52);
  const __m256i magic_bits = _mm256_castpd_si256(magic);
  __m256d n = _mm256_add_pd(_mm256_set1_pd(double(first)), _mm256_setr_pd(0, 1, 2, 3));
  const __m256d four = _mm256_set1_pd(4.0);
  __m256i acc = _mm256_setzero_si256();
  for (; i + 4 <= len; i += 4) {
    const __m256d q = _mm256_round_pd(_mm256_div_pd(xv, n), _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
    const __m256i qi = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(q, magic)), magic_bits);
    std::int32_t raw;
    std::memcpy(&raw, v.data() + i, 4);
    const __m256i c = _mm256_cvtepi8_epi64(_mm_cvtsi32_si128(raw));
    const __m256i nonzero = _mm256_cmpgt_epi64(_mm256_abs_epi32(c), _mm256_setzero_si256());
    const __m256i neg = _mm256_cmpgt_epi64(_mm256_setzero_si256(), c);
    const __m256i masked = _mm256_and_si256(qi, nonzero);
    acc = _mm256_add_epi64(acc, _mm256_sub_epi64(_mm256_xor_si256(masked, neg), neg));
    n = _mm256_add_pd(n, four);
  }
  alignas(32) std::int64_t buf[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(buf), acc);
  std::int64_t s = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < len; ++i) s += std::int64_t(v[i]) * std::int64_t(x / (first + i));
  return s;
}

std::int64_t signed_sum(std::span<const std::int8_t> v) {
  const std::size_t len = v.size();
  std::size_t i = 0;
  std::int64_t total = 0;
  const __m256i ones = _mm256_set1_epi16(1);
  while (i + 32 <= len) {
    __m256i acc = _mm256_setzero_si256();
    // at most 2^16 blocks before the 32-bit lanes could overflow
    for (std::size_t blocks = 0; blocks < 65536 && i + 32 <= len; ++blocks, i += 32) {
      const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v.data() + i));
      const __m256i lo = _mm256_cvtepi8_epi16(_mm256_castsi256_si128(b));
      const __m256i hi = _mm256_cvtepi8_epi16(_mm256_extracti128_si256(b, 1));
      acc = _mm256_add_epi32(acc, _mm256_madd_epi16(_mm256_add_epi16(lo, hi), ones));
    }
    alignas(32) std::int32_t buf[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(buf), acc);
    for (std::int32_t b32 : buf) total += b32;
  }
  for (; i < len; ++i) total += v[i];
  return total;
}

}  // namespace lsl::kernels::avx2
