#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsl/exact.hpp"
#include "lsl/multiplicative.hpp"

namespace lsl::extremal {

enum class Method { Exhaustive, BranchBound, Greedy };

std::string to_string(Method m);
Method parse_method(const std::string& text);

// Minimum of S_f(x) over completely multiplicative f with f(p) = +-1.
struct ExtremalResult {
  std::uint64_t x = 0;
  Rational minimum;
  SignVector argmin;
  Method method = Method::Exhaustive;
  std::uint64_t nodes_explored = 0;
};

inline constexpr std::size_t kExhaustiveMaxPrimes = 26;
inline constexpr std::size_t kBranchMaxPrimes = 30;

// All 2^pi(x) sign vectors, exact integer arithmetic. Ties go to the vector
// with the most -1 signs on the smallest primes.
ExtremalResult delta1_exhaustive(std::uint64_t x, unsigned workers = 1);

// Branches on primes <= sqrt(x); every larger prime enters S_f(x) linearly and
// is set against the sign of its coefficient at each leaf.
ExtremalResult delta1_branch_bound(std::uint64_t x);

// Chooses f(p) in increasing p to minimise the partial sum over integers
// whose prime factors have all been decided. An upper bound for delta1(x).
ExtremalResult delta1_greedy(std::uint64_t x);

// Full enumeration of all sign vectors on the primes <= x. Masks carry bit i
// set when the i-th prime gets +1.
struct SignEnumeration {
  std::uint64_t x = 0;
  std::vector<std::uint64_t> primes;
  Rational minimum;
  std::uint64_t argmin_mask = 0;
  std::uint64_t negative_count = 0;  // vectors with S_f(x) < 0
  std::uint64_t total = 0;
};

SignEnumeration enumerate_sign_vectors(std::uint64_t x, unsigned workers = 1);

// Exact S_f(x) for the completely multiplicative f given by signs, evaluated
// by trial division (independent of the sieves).
Rational logsum_of_signs(const SignVector& signs, std::uint64_t x);

struct CharacterScanResult {
  std::uint64_t x = 0;
  std::int64_t disc_bound = 0;
  Rational minimum;
  std::int64_t argmin_discriminant = 0;
  std::uint64_t discriminants_scanned = 0;
};

// Minimum of sum_{n<=x} chi_d(n)/n over fundamental discriminants
// 1 < |d| <= disc_bound, scanned by increasing |d| with negative d first;
// the first minimiser wins ties.
CharacterScanResult delta0_character_scan(std::uint64_t x, std::int64_t disc_bound, unsigned workers = 1);

// Fundamental discriminants 1 < |d| <= bound in scan order.
std::vector<std::int64_t> fundamental_discriminants(std::int64_t bound);

// S_f(x) for multiplicative f with independent values on every prime power
// p^k <= x ("slots") is affine in each slot, so its minimum over [-1,1]^slots
// sits on a vertex. Enumerates all vertices exactly and checks random
// interior points against that minimum.
struct VertexCheckReport {
  std::uint64_t x = 0;
  std::vector<std::uint64_t> slots;
  Rational vertex_minimum;
  std::vector<std::int8_t> vertex_argmin;  // value per slot
  std::uint64_t samples = 0;
  double min_sample_value = 0;
  std::uint64_t violations = 0;
};

inline constexpr std::size_t kVertexMaxSlots = 20;

VertexCheckReport delta_vertex_check(std::uint64_t x, std::uint64_t samples, std::uint64_t seed);

}  // namespace lsl::extremal
