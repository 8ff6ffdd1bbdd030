#include <cmath>

#include "lsl/kernels.hpp"

namespace lsl::kernels::scalar {

CompensatedSum reciprocal_sum(std::span<const std::int8_t> v, std::uint64_t first) {
  Neumaier acc;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    acc.add(double(v[i]) / double(first + i));
  }
  return acc.result();
}

CompensatedSum fracpart_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x) {
  Neumaier acc;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    const std::uint64_t n = first + i;
    acc.add(double(v[i]) * (double(x % n) / double(n)));
  }
  return acc.result();
}

std::int64_t floor_sum(std::span<const std::int8_t> v, std::uint64_t first, std::uint64_t x) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += std::int64_t(v[i]) * std::int64_t(x / (first + i));
  return s;
}

std::int64_t signed_sum(std::span<const std::int8_t> v) {
  std::int64_t s = 0;
  for (std::int8_t c : v) s += c;
  return s;
}

}  // namespace lsl::kernels::scalar
