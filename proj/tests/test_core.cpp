#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "lsl/error.hpp"
#include "lsl/exact.hpp"
#include "lsl/format.hpp"
#include "lsl/kernels.hpp"
#include "lsl/kronecker.hpp"
#include "lsl/multiplicative.hpp"
#include "lsl/parallel.hpp"
#include "lsl/primes.hpp"
#include "lsl/sieve_cache.hpp"
#include "oracles.hpp"

using namespace lsl;

namespace {

MultiplicativeSpec random_f1(std::uint64_t seed, std::uint64_t limit) {
  std::mt19937_64 rng(seed);
  SignVector sv;
  sv.limit = limit;
  for (auto p : primes_up_to(limit).primes) {
    sv.primes.push_back(p);
    sv.signs.push_back(rng() & 1 ? 1 : -1);
  }
  return MultiplicativeSpec::from_signs(sv);
}

}  // namespace

TEST_CASE("primes") {
  CHECK(primes_up_to(10).primes == std::vector<std::uint64_t>{2, 3, 5, 7});
  CHECK(primes_up_to(1).primes.empty());
  CHECK(primes_up_to(100).size() == 25);
  const auto table = primes_up_to(20000);
  CHECK(table.primes == oracle::primes(20000));
  for (std::uint64_t n = 0; n < 2000; ++n) CHECK(is_prime(n) == oracle::is_prime(n));
  CHECK(table.count_up_to(100) == 25);
  CHECK(table.contains(19997));
  CHECK_FALSE(table.contains(19999));
}

TEST_CASE("smallest prime factors and kernels") {
  const auto spf = smallest_prime_factors(5000);
  CHECK(spf[0] == 0);
  CHECK(spf[1] == 0);
  for (std::uint64_t n = 2; n <= 5000; ++n) CHECK(spf[n] == oracle::factor(n).front().first);
  CHECK(squarefree_parity_kernel(12) == 3);
  CHECK(squarefree_parity_kernel(9) == 1);
  CHECK(squarefree_parity_kernel(10) == 10);
  CHECK_THROWS_AS(squarefree_parity_kernel(0), DomainError);
  for (std::uint64_t a = 1; a <= 60; ++a)
    for (std::uint64_t b = 1; b <= 60; ++b)
      CHECK((squarefree_parity_kernel(a) == squarefree_parity_kernel(b)) == oracle::is_square(a * b));
  CHECK(isqrt(0) == 0);
  CHECK(isqrt(99) == 9);
  CHECK(isqrt(100) == 10);
  CHECK(isqrt(~std::uint64_t(0)) == 4294967295ull);
}

TEST_CASE("kronecker symbol") {
  CHECK(kronecker(-4, 3) == -1);
  CHECK(kronecker(5, 5) == 0);
  for (std::int64_t d : {-7, -4, 5, 8, 12, -163}) CHECK(kronecker(d, 1) == 1);
  CHECK_THROWS_AS(kronecker(0, 3), DomainError);
  CHECK_THROWS_AS(jacobi(3, 10), DomainError);
  for (std::int64_t d = -60; d <= 60; ++d) {
    if (d == 0) continue;
    for (std::uint64_t n = 1; n <= 150; ++n) REQUIRE(kronecker(d, n) == oracle::kronecker(d, n));
  }
  // complete multiplicativity in n
  for (std::int64_t d : {-23, 13, 24})
    for (std::uint64_t m = 1; m < 40; ++m)
      for (std::uint64_t n = 1; n < 40; ++n) CHECK(kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n));
}

TEST_CASE("fundamental discriminants") {
  int count = 0;
  for (std::int64_t d = -20; d <= 20; ++d) count += is_fundamental_discriminant(d);
  CHECK(count == 13);
  CHECK_FALSE(is_fundamental_discriminant(1));
  CHECK(is_fundamental_discriminant(-4));
  CHECK(is_fundamental_discriminant(-163));
  CHECK_FALSE(is_fundamental_discriminant(-16));
  CHECK_FALSE(is_fundamental_discriminant(9));
}

TEST_CASE("multiplicative specs") {
  const auto lam = MultiplicativeSpec::liouville();
  CHECK(lam.value(12) == -1);
  const auto one = MultiplicativeSpec::constant_one();
  for (std::uint64_t n = 1; n < 50; ++n) CHECK(one.value(n) == 1);
  const auto t = sieve_values(lam, 10);
  std::vector<int> got;
  for (std::uint64_t n = 1; n <= 10; ++n) got.push_back(static_cast<int>(t[n]));
  CHECK(got == std::vector<int>{1, -1, -1, 1, -1, 1, -1, -1, 1, 1});

  const auto chi = MultiplicativeSpec::character(-4);
  CHECK(chi.function_class() == FunctionClass::F0);
  for (std::uint64_t n = 1; n < 100; ++n) CHECK(chi.value(n) == oracle::kronecker(-4, n));

  const auto partial = MultiplicativeSpec::from_prime_values(FunctionClass::F1, 10, {{2, 1.0}, {3, -1.0}});
  CHECK_THROWS_AS(sieve_values(partial, 10), ConfigError);
  CHECK_THROWS_AS(sieve_values(partial, 11), ConfigError);
  CHECK_THROWS_AS(MultiplicativeSpec::from_prime_values(FunctionClass::F1, 3, {{2, 0.5}, {3, -1.0}}), ConfigError);
  CHECK_THROWS_AS(MultiplicativeSpec::from_prime_values(FunctionClass::F0, 3, {{2, 0.5}}), ConfigError);
  CHECK_THROWS_AS(MultiplicativeSpec::from_prime_values(FunctionClass::F, 3, {{2, 0.5}, {3, -1.0}}, true, {{4, 0.1}}),
                  ConfigError);
  CHECK_THROWS_AS(MultiplicativeSpec::character(0), DomainError);
}

TEST_CASE("sieved tables are multiplicative") {
  const std::uint64_t limit = 20000;
  std::vector<MultiplicativeSpec> specs = {MultiplicativeSpec::liouville(), MultiplicativeSpec::character(-23),
                                           random_f1(11, limit)};
  std::map<std::uint64_t, double> pv, ppv;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto p : primes_up_to(limit).primes) {
    pv[p] = u(rng);
    for (std::uint64_t pk = p * p; pk <= limit; pk *= p) ppv[pk] = u(rng);
  }
  specs.push_back(MultiplicativeSpec::from_prime_values(FunctionClass::F, limit, pv, false, ppv));
  for (const auto& spec : specs) {
    const auto t = sieve_values(spec, limit);
    CHECK(t[1] == 1);
    for (std::uint64_t n = 1; n <= 3000; ++n) REQUIRE(t[n] == doctest::Approx(spec.value(n)).epsilon(1e-12));
    std::mt19937_64 r(1);
    for (int i = 0; i < 2000; ++i) {
      const std::uint64_t m = 1 + r() % 140, n = 1 + r() % 140;
      if (std::gcd(m, n) == 1 || spec.completely_multiplicative())
        CHECK(t[m * n] == doctest::Approx(t[m] * t[n]).epsilon(1e-12));
    }
  }
}

TEST_CASE("linear and segmented sieves agree") {
  const std::uint64_t limit = 1'000'000;
  for (const auto& spec : {MultiplicativeSpec::liouville(), MultiplicativeSpec::character(12), random_f1(3, limit)}) {
    SieveOptions lin{SieveStrategy::Linear, true};
    SieveOptions seg{SieveStrategy::Segmented, true, 65536};
    CHECK(sieve_values(spec, limit, lin) == sieve_values(spec, limit, seg));
  }
}

TEST_CASE("exact helpers") {
  CHECK(lcm_up_to(10) == 2520);
  CHECK(lcm_up_to(1) == 1);
  CHECK(to_fraction_string(Rational(3)) == "3/1");
  CHECK(parse_fraction("-6/4") == Rational(-3, 2));
  CHECK(rational_from_double(0.375) == Rational(3, 8));
  std::vector<std::int64_t> coeff(500);
  std::mt19937_64 rng(9);
  for (auto& c : coeff) c = static_cast<std::int64_t>(rng() % 5) - 2;
  Rational naive = 0;
  for (std::size_t i = 0; i < coeff.size(); ++i) naive += oracle::q(coeff[i], i + 7);
  CHECK(harmonic_sum(coeff, 7) == naive);
  std::vector<Rational> rs;
  for (int i = 1; i < 30; ++i) rs.push_back(oracle::q(i, i + 3));
  Rational s = 0;
  for (auto& r : rs) s += r;
  CHECK(tree_sum(rs) == s);
}

TEST_CASE("Int192 arithmetic matches GMP") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    BigInt a = BigInt(static_cast<unsigned long>(rng() >> 1)) << 100;
    a += static_cast<unsigned long>(rng());
    if (rng() & 1) a = -a;
    BigInt b = BigInt(static_cast<unsigned long>(rng() >> 3)) << 120;
    if (rng() & 1) b = -b;
    Int192 x = Int192::from_big(a), y = Int192::from_big(b);
    CHECK(x.to_big() == a);
    Int192 z = x;
    z += y;
    CHECK(z.to_big() == a + b);
    z = x;
    z -= y;
    CHECK(z.to_big() == a - b);
    CHECK(x.twice().to_big() == 2 * a);
    CHECK(((x <=> y) < 0) == (a < b));
    CHECK(x.sign() == sgn(a));
  }
  CHECK_THROWS_AS(Int192::from_big(BigInt(1) << 200), ResourceError);
}

TEST_CASE("scalar and vector kernels agree") {
  std::mt19937_64 rng(23);
  for (std::size_t len : {0u, 1u, 7u, 31u, 32u, 33u, 1000u, 65537u}) {
    std::vector<std::int8_t> v(len);
    for (auto& c : v) c = static_cast<std::int8_t>(static_cast<int>(rng() % 3) - 1);
    for (std::uint64_t first : {1ull, 17ull, 1000003ull}) {
      const std::uint64_t x = first + len + 12345;
      const auto rs = kernels::scalar::reciprocal_sum(v, first);
      const auto fs = kernels::scalar::fracpart_sum(v, first, x);
      // exact references
      Rational r = 0, f = 0;
      std::int64_t fl = 0, ss = 0;
      for (std::size_t i = 0; i < len; ++i) {
        const std::uint64_t n = first + i;
        if (!v[i]) continue;
        r += oracle::q(v[i], n);
        f += oracle::q(v[i] * static_cast<long>(x % n), n);
        fl += v[i] * static_cast<std::int64_t>(x / n);
        ss += v[i];
      }
      CHECK(std::abs(rs.value - r.get_d()) <= rs.error + 1e-300);
      CHECK(std::abs(fs.value - f.get_d()) <= fs.error + 1e-300);
      CHECK(kernels::scalar::floor_sum(v, first, x) == fl);
      CHECK(kernels::scalar::signed_sum(v) == ss);
#if defined(LSL_HAVE_AVX2)
      if (kernels::isa_available(kernels::Isa::Avx2)) {
        const auto ra = kernels::avx2::reciprocal_sum(v, first);
        const auto fa = kernels::avx2::fracpart_sum(v, first, x);
        CHECK(std::abs(ra.value - r.get_d()) <= ra.error + 1e-300);
        CHECK(std::abs(fa.value - f.get_d()) <= fa.error + 1e-300);
        CHECK(std::abs(ra.value - rs.value) <= ra.error + rs.error);
        CHECK(kernels::avx2::floor_sum(v, first, x) == fl);
        CHECK(kernels::avx2::signed_sum(v) == ss);
      }
#endif
    }
  }
}

TEST_CASE("isa override") {
  kernels::set_isa_override(kernels::Isa::Scalar);
  CHECK(kernels::active_isa() == kernels::Isa::Scalar);
  kernels::clear_isa_override();
  CHECK(kernels::isa_available(kernels::Isa::Scalar));
  CHECK(kernels::to_string(kernels::Isa::Scalar) == "scalar");
}

TEST_CASE("sieve cache roundtrip") {
  const auto table = sieve_values(MultiplicativeSpec::liouville(), 1'000'000);
  const auto bytes = encode_sieve_cache(table);
  CHECK(bytes.size() == 15 + (1'000'000 + 3) / 4);
  CHECK(decode_sieve_cache(bytes) == table);

  const auto chi = sieve_values(MultiplicativeSpec::character(-20), 1001);
  CHECK(decode_sieve_cache(encode_sieve_cache(chi)) == chi);

  const auto dir = std::filesystem::temp_directory_path() / "lsl-test-cache";
  std::filesystem::create_directories(dir);
  write_sieve_cache(dir / "lam.lslc", table);
  CHECK(read_sieve_cache(dir / "lam.lslc") == table);

  auto truncated = bytes;
  truncated.resize(bytes.size() - 1);
  CHECK_THROWS_AS(decode_sieve_cache(truncated), FormatError);
  CHECK_THROWS_AS(decode_sieve_cache(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 7)), FormatError);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_sieve_cache(magic), FormatError);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_sieve_cache(trailing), FormatError);
  try {
    decode_sieve_cache(encode_sieve_cache(table, 2));
    FAIL("version 2 accepted");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("unknown version") != std::string::npos);
  }
  auto zero_in_f1 = bytes;
  zero_in_f1[15] &= 0xFC;  // f(1) -> code 00
  CHECK_THROWS_AS(decode_sieve_cache(zero_in_f1), FormatError);
  auto bad_code = bytes;
  bad_code[15] = static_cast<std::uint8_t>((bad_code[15] & 0xFC) | 0x2);
  CHECK_THROWS_AS(decode_sieve_cache(bad_code), FormatError);

  std::map<std::uint64_t, double> pv{{2, 0.5}, {3, 0.25}};
  const auto real = sieve_values(MultiplicativeSpec::from_prime_values(FunctionClass::F, 3, pv), 3);
  CHECK_THROWS_AS(encode_sieve_cache(real), ConfigError);
  CHECK_THROWS(read_sieve_cache(dir / "missing.lslc"));
}

TEST_CASE("parallel_for is deterministic") {
  std::vector<std::uint64_t> a(1000), b(1000);
  parallel_for(a.size(), 1, [&](std::size_t t) { a[t] = t * t; });
  parallel_for(b.size(), 4, [&](std::size_t t) { b[t] = t * t; });
  CHECK(a == b);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t t) {
                    if (t == 5) throw DomainError("boom");
                  }),
                  DomainError);
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(static_cast<double>(rng() >> 11), static_cast<int>(rng() % 200) - 150);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
}
