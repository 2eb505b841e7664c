#include "warpcone/metric.hpp"

#include <array>
#include <cstdint>

namespace warpcone {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// 256-bit product as four little-endian 64-bit limbs.
std::array<u64, 4> mul_wide(u128 a, u128 b) {
  const u64 a0 = static_cast<u64>(a), a1 = static_cast<u64>(a >> 64);
  const u64 b0 = static_cast<u64>(b), b1 = static_cast<u64>(b >> 64);
  const u128 p00 = static_cast<u128>(a0) * b0;
  const u128 p01 = static_cast<u128>(a0) * b1;
  const u128 p10 = static_cast<u128>(a1) * b0;
  const u128 p11 = static_cast<u128>(a1) * b1;
  std::array<u64, 4> r{};
  r[0] = static_cast<u64>(p00);
  u128 mid = (p00 >> 64) + static_cast<u64>(p01) + static_cast<u64>(p10);
  r[1] = static_cast<u64>(mid);
  u128 hi = (mid >> 64) + (p01 >> 64) + (p10 >> 64) + static_cast<u64>(p11);
  r[2] = static_cast<u64>(hi);
  r[3] = static_cast<u64>((hi >> 64) + (p11 >> 64));
  return r;
}

}  // namespace

int compare_products(u128 a, u128 b, u128 c, u128 d) {
  const auto x = mul_wide(a, b);
  const auto y = mul_wide(c, d);
  for (int i = 3; i >= 0; --i) {
    if (x[i] != y[i]) return x[i] < y[i] ? -1 : 1;
  }
  return 0;
}

}  // namespace warpcone
