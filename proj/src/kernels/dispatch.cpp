#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "sp/kernels.hpp"

namespace sp::kernels {

namespace {

using FindFn = void (*)(std::span<const std::uint32_t>, std::uint32_t, std::vector<std::uint32_t>&);
using CountFn = std::size_t (*)(std::span<const std::uint32_t>, std::uint32_t);

struct Table {
  Isa isa;
  FindFn find;
  CountFn count;
};

Table make_table(Isa isa) {
  switch (isa) {
    case Isa::avx2: return {isa, &avx2::find_equal, &avx2::count_equal};
    case Isa::neon: return {isa, &neon::find_equal, &neon::count_equal};
    case Isa::scalar: break;
  }
  return {Isa::scalar, &scalar::find_equal, &scalar::count_equal};
}

// SP_KERNEL=scalar forces the reference path.
const Table& active() {
  static const Table t = [] {
    const char* env = std::getenv("SP_KERNEL");
    if (env && std::strcmp(env, "scalar") == 0) return make_table(Isa::scalar);
    return make_table(detect_isa());
  }();
  return t;
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2::compiled() && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
    case Isa::neon: return neon::compiled();
  }
  return false;
}

Isa detect_isa() {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

void find_equal(std::span<const std::uint32_t> hay, std::uint32_t needle, std::vector<std::uint32_t>& out) {
  active().find(hay, needle, out);
}

std::size_t count_equal(std::span<const std::uint32_t> hay, std::uint32_t needle) {
  return active().count(hay, needle);
}

void find_equal(Isa isa, std::span<const std::uint32_t> hay, std::uint32_t needle,
                std::vector<std::uint32_t>& out) {
  if (!isa_available(isa)) throw std::runtime_error(std::string("kernel unavailable: ") + to_string(isa));
  make_table(isa).find(hay, needle, out);
}

std::size_t count_equal(Isa isa, std::span<const std::uint32_t> hay, std::uint32_t needle) {
  if (!isa_available(isa)) throw std::runtime_error(std::string("kernel unavailable: ") + to_string(isa));
  return make_table(isa).count(hay, needle);
}

}  // namespace sp::kernels
