#include "lsl/exact.hpp"

#include <cmath>

#include "lsl/error.hpp"

namespace lsl {

std::string to_fraction_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational parse_fraction(const std::string& text) {
  Rational r;
  if (r.set_str(text, 10) != 0) throw FormatError("not a fraction: " + text);
  if (r.get_den() == 0) throw FormatError("zero denominator: " + text);
  r.canonicalize();
  return r;
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite value has no exact rational form");
  Rational r(v);  // mpq_set_d is exact
  return r;
}

BigInt lcm_up_to(std::uint64_t n) {
  BigInt r = 1;
  for (std::uint64_t k = 2; k <= n; ++k) mpz_lcm_ui(r.get_mpz_t(), r.get_mpz_t(), k);
  return r;
}

namespace {

template <class C>
Rational split(std::span<const C> coeff, std::uint64_t first, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    // small block: common denominator = product of the (few) n's
    Rational acc = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      if constexpr (std::is_same_v<C, Rational>) {
        if (coeff[i] == 0) continue;
        Rational t = coeff[i];
        t /= BigInt(static_cast<unsigned long>(first + i));
        acc += t;
      } else {
        if (coeff[i] == 0) continue;
        Rational t(BigInt(static_cast<long>(coeff[i])), BigInt(static_cast<unsigned long>(first + i)));
        t.canonicalize();
        acc += t;
      }
    }
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  Rational a = split(coeff, first, lo, mid);
  a += split(coeff, first, mid, hi);
  return a;
}

}  // namespace

Rational harmonic_sum(std::span<const std::int64_t> coeff, std::uint64_t first) {
  if (coeff.empty()) return 0;
  return split(coeff, first, 0, coeff.size());
}

Rational harmonic_sum(std::span<const Rational> coeff, std::uint64_t first) {
  if (coeff.empty()) return 0;
  return split(coeff, first, 0, coeff.size());
}

Rational tree_sum(std::vector<Rational> terms) {
  if (terms.empty()) return 0;
  while (terms.size() > 1) {
    std::size_t out = 0;
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) terms[out++] = terms[i] + terms[i + 1];
    if (terms.size() & 1) terms[out++] = std::move(terms.back());
    terms.resize(out);
  }
  return terms.front();
}

Int192::Int192(std::int64_t v) {
  w_[0] = static_cast<std::uint64_t>(v);
  w_[1] = w_[2] = v < 0 ? ~std::uint64_t{0} : 0;
}

Int192 Int192::from_big(const BigInt& v) {
  if (mpz_sizeinbase(v.get_mpz_t(), 2) > 189) throw ResourceError("value exceeds 192-bit enumeration range");
  BigInt mag = abs(v);
  Int192 r;
  for (int i = 0; i < 3; ++i) {
    BigInt limb = mag & BigInt("18446744073709551615");
    r.w_[i] = mpz_get_ui(limb.get_mpz_t());
    mag >>= 64;
  }
  return v < 0 ? -r : r;
}

BigInt Int192::to_big() const {
  const bool neg = sign() < 0;
  const Int192 m = neg ? -*this : *this;
  BigInt r = 0;
  for (int i = 2; i >= 0; --i) {
    r <<= 64;
    r += BigInt(static_cast<unsigned long>(m.w_[i]));
  }
  return neg ? BigInt(-r) : r;
}

}  // namespace lsl
