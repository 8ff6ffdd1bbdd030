#include "lsl/kronecker.hpp"

#include <cstdlib>
#include <utility>

#include "lsl/error.hpp"
#include "lsl/primes.hpp"

namespace lsl {

int jacobi(std::int64_t a_signed, std::uint64_t n) {
  if (n == 0 || (n & 1) == 0) throw DomainError("jacobi: modulus must be odd and positive");
  // reduce a into [0, n)
  std::int64_t r = a_signed % static_cast<std::int64_t>(n);
  if (r < 0) r += static_cast<std::int64_t>(n);
  std::uint64_t a = static_cast<std::uint64_t>(r);
  int t = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      const std::uint64_t m8 = n & 7;
      if (m8 == 3 || m8 == 5) t = -t;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

int kronecker(std::int64_t d, std::uint64_t n) {
  if (d == 0) throw DomainError("kronecker: d must be nonzero");
  if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
  int result = 1;
  if ((n & 1) == 0) {
    if ((d & 1) == 0) return 0;
    const int twos = __builtin_ctzll(n);
    n >>= twos;
    // (d|2) = 1 for d = +-1 (mod 8), -1 for d = +-3 (mod 8)
    const std::int64_t m8 = ((d % 8) + 8) % 8;
    if ((twos & 1) && (m8 == 3 || m8 == 5)) result = -result;
  }
  if (n == 1) return result;
  return result * jacobi(d, n);
}

bool is_fundamental_discriminant(std::int64_t d) {
  if (d == 0 || d == 1) return false;
  const std::int64_t m4 = ((d % 4) + 4) % 4;
  if (m4 == 1) return is_squarefree(static_cast<std::uint64_t>(std::llabs(d)));
  if (m4 == 0) {
    const std::int64_t m = d / 4;
    const std::int64_t mm4 = ((m % 4) + 4) % 4;
    return (mm4 == 2 || mm4 == 3) && is_squarefree(static_cast<std::uint64_t>(std::llabs(m)));
  }
  return false;
}

}  // namespace lsl
