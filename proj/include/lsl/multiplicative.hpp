#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lsl/primes.hpp"

namespace lsl {

// F: values in [-1,1]; F0: values in {-1,0,1}; F1: values +-1.
enum class FunctionClass : std::uint8_t { F = 0, F0 = 1, F1 = 2 };

std::string_view to_string(FunctionClass cls);

// +-1 assigned to every prime <= limit. Defines a completely multiplicative
// member of F1.
struct SignVector {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> primes;
  std::vector<std::int8_t> signs;

  int sign_of(std::uint64_t p) const;
  std::size_t size() const { return primes.size(); }
  bool operator==(const SignVector&) const = default;
};

// A multiplicative function given by its values on primes (and, when not
// completely multiplicative, on higher prime powers).
class MultiplicativeSpec {
 public:
  static constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

  static MultiplicativeSpec liouville();
  static MultiplicativeSpec constant_one();
  // Real character n -> (d|n).
  static MultiplicativeSpec character(std::int64_t d);
  static MultiplicativeSpec from_signs(const SignVector& signs);
  // prime_power_values is keyed by the prime power p^k (k >= 2) and must be
  // empty when completely_multiplicative is true.
  static MultiplicativeSpec from_prime_values(FunctionClass cls, std::uint64_t limit,
                                              const std::map<std::uint64_t, double>& prime_values,
                                              bool completely_multiplicative = true,
                                              const std::map<std::uint64_t, double>& prime_power_values = {});

  FunctionClass function_class() const { return class_; }
  bool completely_multiplicative() const { return completely_multiplicative_; }
  std::uint64_t limit() const { return limit_; }
  const std::string& name() const { return name_; }
  MultiplicativeSpec& rename(std::string name) {
    name_ = std::move(name);
    return *this;
  }

  // True when every prime has the same value (e.g. Liouville, f = 1).
  bool has_constant_prime_value() const { return std::holds_alternative<Constant>(rule_); }

  double prime_value(std::uint64_t p) const;
  // f(p^k) where pk == p^k.
  double prime_power_value(std::uint64_t p, unsigned k, std::uint64_t pk) const;
  // Direct evaluation by trial division; intended for small n and tests.
  double value(std::uint64_t n) const;

 private:
  struct Constant {
    double value;
  };
  struct Kronecker {
    std::int64_t d;
  };
  struct Table {
    std::vector<std::uint64_t> primes;
    std::vector<double> values;
  };

  FunctionClass class_ = FunctionClass::F1;
  bool completely_multiplicative_ = true;
  std::uint64_t limit_ = kUnbounded;
  std::string name_;
  std::variant<Constant, Kronecker, Table> rule_;
  std::vector<std::uint64_t> power_keys_;
  std::vector<double> power_values_;
};

bool value_in_class(double v, FunctionClass cls);

// f(n) for 1 <= n <= limit. Classes F0/F1 keep one signed byte per entry
// (codes), class F keeps doubles (reals). Index 0 is unused and holds 0.
struct ValueTable {
  std::uint64_t limit = 0;
  FunctionClass cls = FunctionClass::F1;
  std::vector<std::int8_t> codes;
  std::vector<double> reals;
  std::vector<std::uint8_t> omega_parity;  // optional, parity of Omega(n)

  bool integral() const { return cls != FunctionClass::F; }
  double operator[](std::uint64_t n) const { return integral() ? double(codes[n]) : reals[n]; }
  bool operator==(const ValueTable&) const = default;
};

enum class SieveStrategy { Auto, Linear, Segmented };

struct SieveOptions {
  SieveStrategy strategy = SieveStrategy::Auto;
  bool omega_parity = false;
  std::uint64_t segment_size = std::uint64_t(1) << 18;
};

// Largest limit served by the monolithic linear sieve under Auto.
inline constexpr std::uint64_t kLinearSieveCeiling = 10'000'000;

ValueTable sieve_values(const MultiplicativeSpec& spec, std::uint64_t limit, const SieveOptions& options = {});

// Streams f(n) over consecutive windows [lo, hi) of [1, limit] without
// materialising the whole table.
class SegmentedSieve {
 public:
  SegmentedSieve(const MultiplicativeSpec& spec, std::uint64_t limit);

  std::uint64_t limit() const { return limit_; }
  void fill(std::uint64_t lo, std::uint64_t hi, std::span<std::int8_t> out) const;
  void fill(std::uint64_t lo, std::uint64_t hi, std::span<double> out) const;
  // parity of Omega(n) for n in [lo, hi)
  void fill_omega_parity(std::uint64_t lo, std::uint64_t hi, std::span<std::uint8_t> out) const;

 private:
  template <class V>
  void fill_impl(std::uint64_t lo, std::uint64_t hi, std::span<V> out) const;

  MultiplicativeSpec spec_;
  std::uint64_t limit_;
  PrimeTable base_;
};

}  // namespace lsl
