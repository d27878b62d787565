#include <atomic>

#include "mjf/error.hpp"
#include "mjf/kernels.hpp"

namespace mjf::kernels {

namespace {

Backend detect() noexcept { return avx2_available() ? Backend::avx2 : Backend::scalar; }

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool avx2_available() noexcept {
#if defined(MJF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::avx2 && !avx2_available()) {
    throw Error("kernels", "KERN_UNSUPPORTED", "AVX2 backend requested but not available");
  }
  current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

void axpy_mod(std::span<std::uint32_t> dst, std::span<const std::uint32_t> src, std::uint32_t c,
              std::uint32_t p) noexcept {
#if defined(MJF_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2::axpy_mod(dst, src, c, p);
#endif
  scalar::axpy_mod(dst, src, c, p);
}

void scale_mod(std::span<std::uint32_t> row, std::uint32_t c, std::uint32_t p) noexcept {
#if defined(MJF_HAVE_AVX2)
  if (active_backend() == Backend::avx2) return avx2::scale_mod(row, c, p);
#endif
  scalar::scale_mod(row, c, p);
}

}  // namespace mjf::kernels
