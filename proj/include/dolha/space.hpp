#pragma once

#include <bit>
#include <cstdint>

namespace dolha {

/// ceil(log2 n), with ceil_log2(0) = ceil_log2(1) = 0.
constexpr std::uint64_t ceil_log2(std::uint64_t n) {
  return n <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(n - 1));
}

/// Analytic size of a snapshot store holding v vertices and e edges, in
/// bits: each vertex cell stores two vertex indices and four edge indices,
/// each edge cell two vertex indices and five edge indices.
constexpr std::uint64_t space_bits(std::uint64_t v, std::uint64_t e) {
  const std::uint64_t lv = ceil_log2(v);
  const std::uint64_t le = ceil_log2(e);
  return (2 * lv + 4 * le) * v + (2 * lv + 5 * le) * e;
}

constexpr std::uint64_t space_bytes(std::uint64_t v, std::uint64_t e) {
  return (space_bits(v, e) + 7) / 8;
}

static_assert(space_bits(5, 6) == 216);

}  // namespace dolha
