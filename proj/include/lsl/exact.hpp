#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lsl {

using Rational = mpq_class;
using BigInt = mpz_class;

// "p/q" with q >= 1, always including the denominator.
std::string to_fraction_string(const Rational& r);
Rational parse_fraction(const std::string& text);

// Exact value of a finite double.
Rational rational_from_double(double v);

// lcm(1, 2, ..., n)
BigInt lcm_up_to(std::uint64_t n);

// sum_{i} coeff[i] / (first + i), exact, by binary splitting.
Rational harmonic_sum(std::span<const std::int64_t> coeff, std::uint64_t first = 1);
// Same with rational numerators.
Rational harmonic_sum(std::span<const Rational> coeff, std::uint64_t first = 1);

// Balanced pairwise sum of rationals.
Rational tree_sum(std::vector<Rational> terms);

// Fixed 192-bit two's complement integer for hot exact-enumeration loops
// whose magnitudes are known to stay below 2^190.
class Int192 {
 public:
  Int192() = default;
  explicit Int192(std::int64_t v);
  static Int192 from_big(const BigInt& v);  // throws ResourceError when out of range
  BigInt to_big() const;

  Int192& operator+=(const Int192& o) {
    unsigned __int128 s = static_cast<unsigned __int128>(w_[0]) + o.w_[0];
    w_[0] = static_cast<std::uint64_t>(s);
    s = (s >> 64) + w_[1] + o.w_[1];
    w_[1] = static_cast<std::uint64_t>(s);
    w_[2] = w_[2] + o.w_[2] + static_cast<std::uint64_t>(s >> 64);
    return *this;
  }
  Int192& operator-=(const Int192& o) { return *this += -o; }
  Int192 operator-() const {
    Int192 r;
    r.w_[0] = ~w_[0];
    r.w_[1] = ~w_[1];
    r.w_[2] = ~w_[2];
    r += Int192(1);
    return r;
  }
  Int192 twice() const {
    Int192 r = *this;
    r += *this;
    return r;
  }
  int sign() const {
    if (static_cast<std::int64_t>(w_[2]) < 0) return -1;
    return (w_[0] | w_[1] | w_[2]) ? 1 : 0;
  }
  friend bool operator==(const Int192&, const Int192&) = default;
  friend std::strong_ordering operator<=>(const Int192& a, const Int192& b) {
    const auto ha = static_cast<std::int64_t>(a.w_[2]), hb = static_cast<std::int64_t>(b.w_[2]);
    if (ha != hb) return ha <=> hb;
    if (a.w_[1] != b.w_[1]) return a.w_[1] <=> b.w_[1];
    return a.w_[0] <=> b.w_[0];
  }

 private:
  std::uint64_t w_[3] = {0, 0, 0};
};

}  // namespace lsl
