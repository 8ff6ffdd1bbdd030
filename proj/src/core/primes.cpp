#include "lsl/primes.hpp"

#include <algorithm>
#include <cmath>

#include "lsl/error.hpp"

namespace lsl {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

bool PrimeTable::contains(std::uint64_t n) const {
  return std::binary_search(primes.begin(), primes.end(), n);
}

std::size_t PrimeTable::count_up_to(std::uint64_t n) const {
  return static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), n) - primes.begin());
}

PrimeTable primes_up_to(std::uint64_t limit) {
  PrimeTable table;
  table.limit = limit;
  if (limit < 2) return table;
  // odd-only Eratosthenes: index i stands for 2i+1
  const std::uint64_t half = (limit - 1) / 2;
  std::vector<std::uint8_t> composite(half + 1, 0);
  table.primes.reserve(limit < 100 ? 32 : static_cast<std::size_t>(1.3 * limit / std::log(double(limit))));
  table.primes.push_back(2);
  for (std::uint64_t i = 1; i <= half; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    table.primes.push_back(p);
    if (p <= limit / p) {
      for (std::uint64_t j = (p * p - 1) / 2; j <= half; j += p) composite[j] = 1;
    }
  }
  return table;
}

std::vector<std::uint32_t> smallest_prime_factors(std::uint32_t limit) {
  std::vector<std::uint32_t> spf(std::size_t(limit) + 1, 0);
  std::vector<std::uint32_t> primes;
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (spf[i] == 0) {
      spf[i] = i;
      primes.push_back(i);
    }
    for (std::uint32_t p : primes) {
      if (p > spf[i] || std::uint64_t(p) * i > limit) break;
      spf[std::size_t(p) * i] = p;
    }
  }
  return spf;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d <= n / d; d += 2)
    if (n % d == 0) return false;
  return true;
}

bool is_squarefree(std::uint64_t n) {
  if (n == 0) return false;
  for (std::uint64_t p = 2; p <= n / p; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return false;
  }
  return true;
}

std::uint64_t squarefree_parity_kernel(std::uint64_t n) {
  if (n == 0) throw DomainError("squarefree_parity_kernel: n must be >= 1");
  std::uint64_t kernel = 1;
  for (std::uint64_t p = 2; p <= n / p; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e & 1) kernel *= p;
  }
  if (n > 1) kernel *= n;
  return kernel;
}

}  // namespace lsl
