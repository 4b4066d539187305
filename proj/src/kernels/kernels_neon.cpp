#include "sp/kernels.hpp"

#include <stdexcept>

#if defined(__aarch64__) || defined(__ARM_NEON)
#include <arm_neon.h>
#define SP_HAVE_NEON_TU 1
#endif

namespace sp::kernels::neon {

#ifdef SP_HAVE_NEON_TU

bool compiled() { return true; }

void find_equal(std::span<const std::uint32_t> hay, std::uint32_t needle, std::vector<std::uint32_t>& out) {
  const std::size_t n = hay.size();
  const uint32x4_t key = vdupq_n_u32(needle);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t eq = vceqq_u32(vld1q_u32(hay.data() + i), key);
    if (vmaxvq_u32(eq) == 0) continue;
    std::uint32_t lanes[4];
    vst1q_u32(lanes, eq);
    for (unsigned k = 0; k < 4; ++k)
      if (lanes[k]) out.push_back(static_cast<std::uint32_t>(i + k));
  }
  for (; i < n; ++i)
    if (hay[i] == needle) out.push_back(static_cast<std::uint32_t>(i));
}

std::size_t count_equal(std::span<const std::uint32_t> hay, std::uint32_t needle) {
  const std::size_t n = hay.size();
  const uint32x4_t key = vdupq_n_u32(needle);
  uint32x4_t acc = vdupq_n_u32(0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // equal lanes are all-ones; shifting right by 31 turns them into 1
    acc = vaddq_u32(acc, vshrq_n_u32(vceqq_u32(vld1q_u32(hay.data() + i), key), 31));
  }
  std::size_t total = vaddvq_u32(acc);
  for (; i < n; ++i) total += (hay[i] == needle);
  return total;
}

#else

bool compiled() { return false; }
void find_equal(std::span<const std::uint32_t>, std::uint32_t, std::vector<std::uint32_t>&) {
  throw std::runtime_error("neon kernel not compiled");
}
std::size_t count_equal(std::span<const std::uint32_t>, std::uint32_t) {
  throw std::runtime_error("neon kernel not compiled");
}

#endif

}  // namespace sp::kernels::neon
