#include "lsl/multiplicative.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "lsl/error.hpp"
#include "lsl/kronecker.hpp"

namespace lsl {

std::string_view to_string(FunctionClass cls) {
  switch (cls) {
    case FunctionClass::F: return "F";
    case FunctionClass::F0: return "F0";
    case FunctionClass::F1: return "F1";
  }
  return "?";
}

bool value_in_class(double v, FunctionClass cls) {
  switch (cls) {
    case FunctionClass::F: return v >= -1.0 && v <= 1.0;
    case FunctionClass::F0: return v == -1.0 || v == 0.0 || v == 1.0;
    case FunctionClass::F1: return v == -1.0 || v == 1.0;
  }
  return false;
}

int SignVector::sign_of(std::uint64_t p) const {
  auto it = std::lower_bound(primes.begin(), primes.end(), p);
  if (it == primes.end() || *it != p) throw ConfigError("sign vector has no entry for " + std::to_string(p));
  return signs[static_cast<std::size_t>(it - primes.begin())];
}

MultiplicativeSpec MultiplicativeSpec::liouville() {
  MultiplicativeSpec s;
  s.name_ = "liouville";
  s.rule_ = Constant{-1.0};
  return s;
}

MultiplicativeSpec MultiplicativeSpec::constant_one() {
  MultiplicativeSpec s;
  s.name_ = "one";
  s.rule_ = Constant{1.0};
  return s;
}

MultiplicativeSpec MultiplicativeSpec::character(std::int64_t d) {
  if (d == 0) throw DomainError("character: d must be nonzero");
  MultiplicativeSpec s;
  s.class_ = FunctionClass::F0;
  s.name_ = "char:" + std::to_string(d);
  s.rule_ = Kronecker{d};
  return s;
}

MultiplicativeSpec MultiplicativeSpec::from_signs(const SignVector& signs) {
  MultiplicativeSpec s;
  s.name_ = "signs";
  s.limit_ = signs.limit;
  Table t;
  t.primes = signs.primes;
  t.values.assign(signs.signs.begin(), signs.signs.end());
  s.rule_ = std::move(t);
  return s;
}

MultiplicativeSpec MultiplicativeSpec::from_prime_values(FunctionClass cls, std::uint64_t limit,
                                                         const std::map<std::uint64_t, double>& prime_values,
                                                         bool completely_multiplicative,
                                                         const std::map<std::uint64_t, double>& prime_power_values) {
  if (completely_multiplicative && !prime_power_values.empty())
    throw ConfigError("prime power values given for a completely multiplicative spec");
  MultiplicativeSpec s;
  s.class_ = cls;
  s.completely_multiplicative_ = completely_multiplicative;
  s.limit_ = limit;
  s.name_ = "table";
  Table t;
  for (const auto& [p, v] : prime_values) {
    if (!value_in_class(v, cls))
      throw ConfigError("value " + std::to_string(v) + " at prime " + std::to_string(p) + " outside class " +
                        std::string(to_string(cls)));
    t.primes.push_back(p);
    t.values.push_back(v);
  }
  for (const auto& [pk, v] : prime_power_values) {
    if (!value_in_class(v, cls))
      throw ConfigError("value at prime power " + std::to_string(pk) + " outside class " + std::string(to_string(cls)));
    s.power_keys_.push_back(pk);
    s.power_values_.push_back(v);
  }
  s.rule_ = std::move(t);
  return s;
}

double MultiplicativeSpec::prime_value(std::uint64_t p) const {
  if (const auto* c = std::get_if<Constant>(&rule_)) return c->value;
  if (const auto* k = std::get_if<Kronecker>(&rule_)) return kronecker(k->d, p);
  const auto& t = std::get<Table>(rule_);
  auto it = std::lower_bound(t.primes.begin(), t.primes.end(), p);
  if (it == t.primes.end() || *it != p)
    throw ConfigError("spec '" + name_ + "' has no value for prime " + std::to_string(p));
  return t.values[static_cast<std::size_t>(it - t.primes.begin())];
}

double MultiplicativeSpec::prime_power_value(std::uint64_t p, unsigned k, std::uint64_t pk) const {
  if (k == 1) return prime_value(p);
  if (completely_multiplicative_) {
    const double v = prime_value(p);
    double r = 1.0;
    for (unsigned i = 0; i < k; ++i) r *= v;
    return r;
  }
  auto it = std::lower_bound(power_keys_.begin(), power_keys_.end(), pk);
  if (it == power_keys_.end() || *it != pk)
    throw ConfigError("spec '" + name_ + "' has no value for prime power " + std::to_string(pk));
  return power_values_[static_cast<std::size_t>(it - power_keys_.begin())];
}

double MultiplicativeSpec::value(std::uint64_t n) const {
  if (n == 0) throw DomainError("f(0) is undefined");
  double r = 1.0;
  for (std::uint64_t p = 2; p <= n / p; ++p) {
    if (n % p) continue;
    unsigned k = 0;
    std::uint64_t pk = 1;
    while (n % p == 0) {
      n /= p;
      pk *= p;
      ++k;
    }
    r *= prime_power_value(p, k, pk);
  }
  if (n > 1) r *= prime_value(n);
  return r;
}

namespace {

void check_coverage(const MultiplicativeSpec& spec, std::uint64_t limit) {
  if (spec.limit() != MultiplicativeSpec::kUnbounded && limit > spec.limit())
    throw ConfigError("spec '" + spec.name() + "' covers primes up to " + std::to_string(spec.limit()) +
                      " but " + std::to_string(limit) + " was requested");
}

template <class V>
V as_value(double v) {
  if constexpr (std::is_same_v<V, std::int8_t>)
    return static_cast<std::int8_t>(v);
  else
    return v;
}

// Linear (smallest-prime-factor) sieve. pp[n] is the full power of spf(n)
// dividing n, so f(n) = f(pp[n]) * f(n / pp[n]).
template <class V>
void linear_fill(const MultiplicativeSpec& spec, std::uint64_t limit, std::vector<V>& val,
                 std::vector<std::uint8_t>* parity) {
  const auto n_max = static_cast<std::uint32_t>(limit);
  val.assign(limit + 1, V{});
  if (parity) parity->assign(limit + 1, 0);
  if (limit == 0) return;
  val[1] = V(1);
  std::vector<std::uint32_t> spf(limit + 1, 0);
  std::vector<std::uint32_t> pp;
  const bool cm = spec.completely_multiplicative();
  if (!cm) pp.assign(limit + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint32_t i = 2; i <= n_max; ++i) {
    if (spf[i] == 0) {
      spf[i] = i;
      if (!cm) pp[i] = i;
      primes.push_back(i);
      val[i] = as_value<V>(spec.prime_value(i));
      if (parity) (*parity)[i] = 1;
    }
    const std::uint32_t si = spf[i];
    for (std::uint32_t p : primes) {
      if (p > si || std::uint64_t(p) * i > n_max) break;
      const std::uint32_t n = p * i;
      spf[n] = p;
      if (parity) (*parity)[n] = (*parity)[i] ^ 1;
      if (cm) {
        val[n] = static_cast<V>(val[p] * val[i]);
        continue;
      }
      if (p == si) {
        pp[n] = pp[i] * p;
        if (pp[n] == n) {
          unsigned k = 0;
          for (std::uint32_t t = n; t > 1; t /= p) ++k;
          val[n] = as_value<V>(spec.prime_power_value(p, k, n));
        } else {
          val[n] = static_cast<V>(val[pp[n]] * val[n / pp[n]]);
        }
      } else {
        pp[n] = p;
        val[n] = static_cast<V>(val[p] * val[i]);
      }
    }
  }
}

}  // namespace

SegmentedSieve::SegmentedSieve(const MultiplicativeSpec& spec, std::uint64_t limit)
    : spec_(spec), limit_(limit), base_(primes_up_to(isqrt(limit))) {
  check_coverage(spec, limit);
}

template <class V>
void SegmentedSieve::fill_impl(std::uint64_t lo, std::uint64_t hi, std::span<V> out) const {
  if (lo < 1 || hi < lo || hi - 1 > limit_ || out.size() < hi - lo)
    throw DomainError("segment [" + std::to_string(lo) + ", " + std::to_string(hi) + ") outside sieve range");
  const std::size_t len = hi - lo;
  std::vector<std::uint64_t> prod(len, 1);
  std::fill(out.begin(), out.begin() + len, V(1));
  const bool cm = spec_.completely_multiplicative();
  for (std::uint64_t p : base_.primes) {
    if (p * p >= hi) break;
    if (cm) {
      const V fp = as_value<V>(spec_.prime_value(p));
      // every power p^k dividing n contributes one factor f(p)
      for (std::uint64_t pk = p;; pk *= p) {
        for (std::uint64_t m = (lo + pk - 1) / pk * pk; m < hi; m += pk) {
          out[m - lo] = static_cast<V>(out[m - lo] * fp);
          prod[m - lo] *= p;
        }
        if (pk > (hi - 1) / p) break;
      }
    } else {
      for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
        std::uint64_t r = m / p, pk = p;
        unsigned k = 1;
        while (r % p == 0) {
          r /= p;
          pk *= p;
          ++k;
        }
        out[m - lo] = static_cast<V>(out[m - lo] * as_value<V>(spec_.prime_power_value(p, k, pk)));
        prod[m - lo] *= pk;
      }
    }
  }
  const bool constant = spec_.has_constant_prime_value();
  const V fconst = constant ? as_value<V>(spec_.prime_value(2)) : V{};
  for (std::size_t i = 0; i < len; ++i) {
    const std::uint64_t n = lo + i;
    if (prod[i] == n) continue;
    // exactly one prime factor above sqrt(n) remains
    const V fq = constant ? fconst : as_value<V>(spec_.prime_value(n / prod[i]));
    out[i] = static_cast<V>(out[i] * fq);
  }
}

void SegmentedSieve::fill(std::uint64_t lo, std::uint64_t hi, std::span<std::int8_t> out) const {
  if (spec_.function_class() == FunctionClass::F)
    throw ConfigError("class F values need a floating-point segment");
  fill_impl<std::int8_t>(lo, hi, out);
}

void SegmentedSieve::fill(std::uint64_t lo, std::uint64_t hi, std::span<double> out) const {
  fill_impl<double>(lo, hi, out);
}

void SegmentedSieve::fill_omega_parity(std::uint64_t lo, std::uint64_t hi, std::span<std::uint8_t> out) const {
  if (lo < 1 || hi < lo || hi - 1 > limit_ || out.size() < hi - lo) throw DomainError("segment outside sieve range");
  const std::size_t len = hi - lo;
  std::vector<std::uint64_t> prod(len, 1);
  std::fill(out.begin(), out.begin() + len, std::uint8_t{0});
  for (std::uint64_t p : base_.primes) {
    if (p * p >= hi) break;
    for (std::uint64_t pk = p;; pk *= p) {
      for (std::uint64_t m = (lo + pk - 1) / pk * pk; m < hi; m += pk) {
        out[m - lo] ^= 1;
        prod[m - lo] *= p;
      }
      if (pk > (hi - 1) / p) break;
    }
  }
  for (std::size_t i = 0; i < len; ++i)
    if (prod[i] != lo + i) out[i] ^= 1;
}

ValueTable sieve_values(const MultiplicativeSpec& spec, std::uint64_t limit, const SieveOptions& options) {
  check_coverage(spec, limit);
  ValueTable table;
  table.limit = limit;
  table.cls = spec.function_class();
  const bool integral = table.integral();
  auto* parity = options.omega_parity ? &table.omega_parity : nullptr;

  const bool linear = options.strategy == SieveStrategy::Linear ||
                      (options.strategy == SieveStrategy::Auto && limit <= kLinearSieveCeiling);
  if (linear) {
    if (limit > std::numeric_limits<std::uint32_t>::max() / 2) throw ResourceError("linear sieve limit too large");
    if (integral)
      linear_fill(spec, limit, table.codes, parity);
    else
      linear_fill(spec, limit, table.reals, parity);
    return table;
  }

  SegmentedSieve sieve(spec, limit);
  if (integral)
    table.codes.assign(limit + 1, 0);
  else
    table.reals.assign(limit + 1, 0.0);
  if (parity) parity->assign(limit + 1, 0);
  const std::uint64_t seg = std::max<std::uint64_t>(options.segment_size, 64);
  for (std::uint64_t lo = 1; lo <= limit; lo += seg) {
    const std::uint64_t hi = std::min(limit + 1, lo + seg);
    if (integral)
      sieve.fill(lo, hi, std::span<std::int8_t>(table.codes.data() + lo, hi - lo));
    else
      sieve.fill(lo, hi, std::span<double>(table.reals.data() + lo, hi - lo));
    if (parity) sieve.fill_omega_parity(lo, hi, std::span<std::uint8_t>(parity->data() + lo, hi - lo));
  }
  return table;
}

}  // namespace lsl
