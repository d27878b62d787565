#include "mjf/kernels.hpp"

namespace mjf::kernels::scalar {

void axpy_mod(std::span<std::uint32_t> dst, std::span<const std::uint32_t> src, std::uint32_t c,
              std::uint32_t p) noexcept {
  const std::size_t n = dst.size();
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = static_cast<std::uint32_t>((dst[i] + static_cast<std::uint64_t>(c) * src[i]) % p);
  }
}

void scale_mod(std::span<std::uint32_t> row, std::uint32_t c, std::uint32_t p) noexcept {
  for (auto& x : row) x = static_cast<std::uint32_t>(static_cast<std::uint64_t>(c) * x % p);
}

}  // namespace mjf::kernels::scalar
