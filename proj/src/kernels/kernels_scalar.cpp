#include "sp/kernels.hpp"

namespace sp::kernels::scalar {

void find_equal(std::span<const std::uint32_t> hay, std::uint32_t needle, std::vector<std::uint32_t>& out) {
  for (std::size_t i = 0; i < hay.size(); ++i)
    if (hay[i] == needle) out.push_back(static_cast<std::uint32_t>(i));
}

std::size_t count_equal(std::span<const std::uint32_t> hay, std::uint32_t needle) {
  std::size_t n = 0;
  for (auto v : hay) n += (v == needle);
  return n;
}

}  // namespace sp::kernels::scalar
