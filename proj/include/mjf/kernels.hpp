#pragma once

#include <cstdint>
#include <span>
#include <string_view>

// Row kernels for dense elimination over F_p. Every entry is a canonical
// representative in [0, p). The scalar variants are the reference; the AVX2
// variants are selected at runtime when the CPU supports them and must agree
// with the scalar ones bit for bit.
namespace mjf::kernels {

enum class Backend { scalar, avx2 };

namespace scalar {
void axpy_mod(std::span<std::uint32_t> dst, std::span<const std::uint32_t> src, std::uint32_t c,
              std::uint32_t p) noexcept;
void scale_mod(std::span<std::uint32_t> row, std::uint32_t c, std::uint32_t p) noexcept;
}  // namespace scalar

namespace avx2 {
// Only valid when avx2_available(). Falls back to scalar for p >= 2^26,
// where the double-precision reduction is no longer exact.
void axpy_mod(std::span<std::uint32_t> dst, std::span<const std::uint32_t> src, std::uint32_t c,
              std::uint32_t p) noexcept;
void scale_mod(std::span<std::uint32_t> row, std::uint32_t c, std::uint32_t p) noexcept;
}  // namespace avx2

bool avx2_available() noexcept;

Backend active_backend() noexcept;
/// Throws mjf::Error when the requested backend is not supported here.
void set_backend(Backend backend);
std::string_view backend_name(Backend backend) noexcept;

/// dst <- dst + c * src  (mod p)
void axpy_mod(std::span<std::uint32_t> dst, std::span<const std::uint32_t> src, std::uint32_t c,
              std::uint32_t p) noexcept;
/// row <- c * row  (mod p)
void scale_mod(std::span<std::uint32_t> row, std::uint32_t c, std::uint32_t p) noexcept;

}  // namespace mjf::kernels
