#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lsl {

std::uint64_t isqrt(std::uint64_t n);

// Ascending list of all primes <= limit.
struct PrimeTable {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> primes;

  std::size_t size() const { return primes.size(); }
  bool contains(std::uint64_t n) const;
  // Number of listed primes <= n (n may exceed limit only if n <= limit).
  std::size_t count_up_to(std::uint64_t n) const;
};

PrimeTable primes_up_to(std::uint64_t limit);

// Smallest prime factor for every n in [0, limit]; spf[0] = spf[1] = 0.
std::vector<std::uint32_t> smallest_prime_factors(std::uint32_t limit);

bool is_prime(std::uint64_t n);
bool is_squarefree(std::uint64_t n);

// Product of the primes dividing n to an odd power. m*n is a perfect
// square exactly when the kernels of m and n agree.
std::uint64_t squarefree_parity_kernel(std::uint64_t n);

}  // namespace lsl
