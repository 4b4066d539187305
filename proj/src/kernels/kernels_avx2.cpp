#include "sp/kernels.hpp"

#include <stdexcept>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define SP_HAVE_AVX2_TU 1
#endif

namespace sp::kernels::avx2 {

#ifdef SP_HAVE_AVX2_TU

bool compiled() { return true; }

__attribute__((target("avx2,popcnt"))) void find_equal(std::span<const std::uint32_t> hay, std::uint32_t needle,
                                                      std::vector<std::uint32_t>& out) {
  const std::size_t n = hay.size();
  const __m256i key = _mm256_set1_epi32(static_cast<int>(needle));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hay.data() + i));
    auto mask = static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(v, key))));
    while (mask) {
      const unsigned bit = static_cast<unsigned>(__builtin_ctz(mask));
      out.push_back(static_cast<std::uint32_t>(i + bit));
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i)
    if (hay[i] == needle) out.push_back(static_cast<std::uint32_t>(i));
}

__attribute__((target("avx2,popcnt"))) std::size_t count_equal(std::span<const std::uint32_t> hay,
                                                              std::uint32_t needle) {
  const std::size_t n = hay.size();
  const __m256i key = _mm256_set1_epi32(static_cast<int>(needle));
  std::size_t i = 0, total = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hay.data() + i));
    const auto mask = static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(v, key))));
    total += static_cast<std::size_t>(__builtin_popcount(mask));
  }
  for (; i < n; ++i) total += (hay[i] == needle);
  return total;
}

#else

bool compiled() { return false; }
void find_equal(std::span<const std::uint32_t>, std::uint32_t, std::vector<std::uint32_t>&) {
  throw std::runtime_error("avx2 kernel not compiled");
}
std::size_t count_equal(std::span<const std::uint32_t>, std::uint32_t) {
  throw std::runtime_error("avx2 kernel not compiled");
}

#endif

}  // namespace sp::kernels::avx2
