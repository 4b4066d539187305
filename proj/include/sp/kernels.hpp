#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sp::kernels {

enum class Isa { scalar, avx2, neon };

const char* to_string(Isa isa);

/// Best variant supported by this CPU and build.
Isa detect_isa();
bool isa_available(Isa isa);

/// Appends every index i with hay[i] == needle, ascending.
void find_equal(std::span<const std::uint32_t> hay, std::uint32_t needle, std::vector<std::uint32_t>& out);
/// Number of i with hay[i] == needle.
std::size_t count_equal(std::span<const std::uint32_t> hay, std::uint32_t needle);

// Explicit variants. Calling one that is not available throws std::runtime_error.
void find_equal(Isa isa, std::span<const std::uint32_t> hay, std::uint32_t needle,
                std::vector<std::uint32_t>& out);
std::size_t count_equal(Isa isa, std::span<const std::uint32_t> hay, std::uint32_t needle);

namespace scalar {
void find_equal(std::span<const std::uint32_t> hay, std::uint32_t needle, std::vector<std::uint32_t>& out);
std::size_t count_equal(std::span<const std::uint32_t> hay, std::uint32_t needle);
}  // namespace scalar

namespace avx2 {
bool compiled();
void find_equal(std::span<const std::uint32_t> hay, std::uint32_t needle, std::vector<std::uint32_t>& out);
std::size_t count_equal(std::span<const std::uint32_t> hay, std::uint32_t needle);
}  // namespace avx2

namespace neon {
bool compiled();
void find_equal(std::span<const std::uint32_t> hay, std::uint32_t needle, std::vector<std::uint32_t>& out);
std::size_t count_equal(std::span<const std::uint32_t> hay, std::uint32_t needle);
}  // namespace neon

}  // namespace sp::kernels
