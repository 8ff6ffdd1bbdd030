#pragma once

#include <cstdint>

namespace lsl {

// Kronecker symbol (d | n) for d != 0, n >= 0. Completely multiplicative in n.
int kronecker(std::int64_t d, std::uint64_t n);

// Jacobi symbol (a | n) for odd n > 0.
int jacobi(std::int64_t a, std::uint64_t n);

// d = 1 (mod 4) squarefree, or d = 4m with m = 2,3 (mod 4) squarefree; d != 1.
bool is_fundamental_discriminant(std::int64_t d);

}  // namespace lsl
