#include <doctest.h>

#include <cmath>

#include "lsl/error.hpp"
#include "lsl/extremal.hpp"
#include "lsl/primes.hpp"
#include "lsl/random_mult.hpp"
#include "oracles.hpp"

using namespace lsl;
using namespace lsl::randmult;

TEST_CASE("sign vectors are deterministic and balanced") {
  const auto a = sample_sign_vector({42, 100000});
  CHECK(a == sample_sign_vector({42, 100000}));
  CHECK(a.primes == primes_up_to(100000).primes);
  CHECK(sample_sign_vector({42, 1}).primes.empty());
  // a prefix is the restriction of the longer vector
  const auto short_v = sample_sign_vector({42, 1000});
  for (std::size_t i = 0; i < short_v.size(); ++i) CHECK(short_v.signs[i] == a.signs[i]);
  for (std::size_t i = 0; i < a.size(); i += 997) CHECK(a.signs[i] == prime_sign(42, a.primes[i]));

  const auto b = sample_sign_vector({43, 100000});
  const double n = static_cast<double>(a.size());
  std::size_t differ = 0, plus = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    differ += a.signs[i] != b.signs[i];
    plus += a.signs[i] > 0;
  }
  CHECK(std::abs(differ - n / 2) <= 3 * std::sqrt(n) / 2);
  CHECK(std::abs(plus - n / 2) <= 3 * std::sqrt(n) / 2);
}

TEST_CASE("Wilson intervals") {
  for (std::uint64_t trials : {1u, 10u, 1000u})
    for (std::uint64_t hits = 0; hits <= trials; hits += std::max<std::uint64_t>(1, trials / 7)) {
      const auto w = wilson_interval(hits, trials);
      const double p = static_cast<double>(hits) / static_cast<double>(trials);
      CHECK(w.contains(p));
      CHECK(w.lo >= 0);
      CHECK(w.hi <= 1);
    }
  CHECK(wilson_interval(0, 100).lo == 0);
  CHECK(wilson_interval(0, 100).hi > 0);
  CHECK(wilson_interval(50, 100).hi - wilson_interval(50, 100).lo > wilson_interval(5000, 10000).hi - wilson_interval(5000, 10000).lo);
}

TEST_CASE("negativity probability") {
  const auto t3 = negativity_probability_mc(3, 1000, 1);
  CHECK(t3.hits == 0);
  CHECK(t3.estimate == 0);
  CHECK(negativity_probability_exact(10) == 0);
  CHECK(negativity_probability_exact(1) == 0);
  CHECK_THROWS_AS(negativity_probability_mc(3, 0, 1), DomainError);

  // exact count against a brute-force sign enumeration
  for (std::uint64_t x : {12u, 20u, 30u}) {
    const auto ps = oracle::primes(x);
    std::uint64_t neg = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << ps.size()); ++mask)
      neg += oracle::logsum([&](std::uint64_t n) { return oracle::value_from_mask(n, ps, mask); }, x) < 0;
    CHECK(negativity_probability_exact(x) == Rational(oracle::q(static_cast<long>(neg), std::uint64_t(1) << ps.size())));
  }
  // beyond the fully enumerated range of the examples
  const auto exact = negativity_probability_exact(60);
  const auto mc = negativity_probability_mc(60, 20000, 5);
  CHECK(mc.wilson.contains(exact.get_d()));
  CHECK(mc.hits <= mc.trials);
  CHECK(mc.estimate == static_cast<double>(mc.hits) / 20000);
  CHECK(mc.wilson.contains(mc.estimate));
  const auto mc30 = negativity_probability_mc(30, 100000, 9);
  CHECK(mc30.wilson.contains(negativity_probability_exact(30).get_d()));
}

TEST_CASE("Monte Carlo is worker independent") {
  const auto a = negativity_probability_mc(80, 5000, 3, 1);
  const auto b = negativity_probability_mc(80, 5000, 3, 3);
  CHECK(a.hits == b.hits);
  const auto m1 = empirical_moment(50, 4, 3000, 8, 1);
  const auto m3 = empirical_moment(50, 4, 3000, 8, 3);
  CHECK(m1.empirical_value == m3.empirical_value);
  CHECK(m1.standard_error == m3.standard_error);
  const auto f1 = fracpart_tail_mc(200, 0.1, 3000, 4, 1);
  const auto f3 = fracpart_tail_mc(200, 0.1, 3000, 4, 3);
  CHECK(f1.hits == f3.hits);
}

TEST_CASE("exact even moments") {
  CHECK(exact_even_moment(10, 2) == 18);
  CHECK(exact_even_moment(1, 2) == 1);
  CHECK(exact_even_moment(4, 2) == 6);
  CHECK(exact_even_moment(7, 0) == 1);
  CHECK_THROWS_AS(exact_even_moment(10, 3), DomainError);
  for (std::uint64_t x : {3u, 10u, 17u, 40u}) CHECK(exact_even_moment(x, 2) == oracle::square_tuples(x, 2));
  for (std::uint64_t x : {5u, 10u, 14u}) CHECK(exact_even_moment(x, 4) == oracle::square_tuples(x, 4));
  for (std::uint64_t x = 1; x <= 30; ++x) CHECK(mpq_class(exact_even_moment(x, 2)) == oracle::moment_by_enumeration(x, 2));
  CHECK(mpq_class(exact_even_moment(12, 4)) == oracle::moment_by_enumeration(12, 4));
  CHECK_THROWS_AS(exact_even_moment(100000, 8), ResourceError);
}

TEST_CASE("empirical moments converge to exact values") {
  for (auto [x, q] : {std::pair{10u, 2u}, {30u, 2u}, {10u, 4u}}) {
    const auto r = empirical_moment(x, q, 100000, 17);
    REQUIRE(r.exact_value.has_value());
    CHECK(std::abs(r.empirical_value - static_cast<double>(*r.exact_value)) <= 3 * r.standard_error);
  }
  const auto r = empirical_moment(10, 2, 100000, 1);
  CHECK(*r.relative_deviation <= 0.05);
  // odd moments are defined; E[f(n_1)...f(n_q)] is 1 exactly when the
  // product is a square, so they count square-product tuples too
  for (unsigned q : {1u, 3u}) {
    const auto odd = empirical_moment(20, q, 50000, 2);
    CHECK_FALSE(odd.exact_value.has_value());
    CHECK(std::abs(odd.empirical_value - static_cast<double>(oracle::square_tuples(20, q))) <= 3 * odd.standard_error);
  }
  const auto one = empirical_moment(1, 3, 100, 2);
  CHECK(one.empirical_value == 1);
  CHECK(one.standard_error == 0);
  CHECK_THROWS_AS(empirical_moment(10, 2, 0, 1), DomainError);
}

TEST_CASE("majorant direction for the fractional-part weight") {
  for (std::uint64_t x : {10u, 30u, 100u})
    for (unsigned q : {2u, 4u}) {
      const auto phi = empirical_moment(x, q, 20000, 11, 1, MomentWeight::FracPart);
      const auto t = empirical_moment(x, q, 20000, 11, 1, MomentWeight::Unit);
      CHECK(phi.empirical_value <= t.empirical_value + 5 * t.standard_error);
      CHECK_FALSE(phi.exact_value.has_value());
    }
}

TEST_CASE("prime sum tails") {
  const auto impossible = prime_sum_tail(100, 26, 10000, 1);
  CHECK(impossible.hits == 0);
  CHECK(impossible.hoeffding_bound == doctest::Approx(std::exp(-26.0 * 26.0 / 50.0)));
  const auto t10 = prime_sum_tail(100, 10, 1'000'000, 2);
  CHECK(t10.empirical <= t10.hoeffding_bound);
  const auto mid = prime_sum_tail(100, 100 / (2 * std::log(100.0)), 10000, 3);
  CHECK(std::isfinite(mid.empirical));
  CHECK(std::isfinite(mid.hoeffding_bound));
}

TEST_CASE("fractional-part tails") {
  const auto none = fracpart_tail_mc(1000, std::log(1000.0), 2000, 1);
  CHECK(none.hits == 0);
  const auto a = fracpart_tail_mc(1000, 0.1, 10000, 6);
  const auto b = fracpart_tail_mc(1000, 0.1, 10000, 6);
  CHECK(a.hits == b.hits);
  CHECK(a.wilson.contains(a.estimate));
  CHECK_THROWS_AS(fracpart_tail_mc(1000, 0, 10, 1), DomainError);
  CHECK_THROWS_AS(fracpart_tail_mc(1, 1, 10, 1), DomainError);
}
