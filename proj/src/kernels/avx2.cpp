// Compiled with -mavx2. Nothing in here may run unless avx2_available().
#include <immintrin.h>

#include "mjf/kernels.hpp"

namespace mjf::kernels::avx2 {

namespace {

constexpr std::uint32_t kMaxExactModulus = 1u << 26;

// v in [0, 2^53) holding an integer; returns v mod p as doubles.
// floor(v * (1/p)) is off by at most one, fixed by the two conditional steps.
inline __m256d reduce(__m256d v, __m256d vp, __m256d vinv) {
  __m256d q = _mm256_floor_pd(_mm256_mul_pd(v, vinv));
  __m256d r = _mm256_sub_pd(v, _mm256_mul_pd(q, vp));
  __m256d neg = _mm256_cmp_pd(r, _mm256_setzero_pd(), _CMP_LT_OQ);
  r = _mm256_add_pd(r, _mm256_and_pd(neg, vp));
  __m256d big = _mm256_cmp_pd(r, vp, _CMP_GE_OQ);
  r = _mm256_sub_pd(r, _mm256_and_pd(big, vp));
  return r;
}

}  // namespace

void axpy_mod(std::span<std::uint32_t> dst, std::span<const std::uint32_t> src, std::uint32_t c,
              std::uint32_t p) noexcept {
  if (p >= kMaxExactModulus) return scalar::axpy_mod(dst, src, c, p);
  const std::size_t n = dst.size();
  const __m256d vp = _mm256_set1_pd(static_cast<double>(p));
  const __m256d vinv = _mm256_set1_pd(1.0 / static_cast<double>(p));
  const __m256d vc = _mm256_set1_pd(static_cast<double>(c));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m128i d32 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(dst.data() + i));
    __m128i s32 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src.data() + i));
    __m256d v = _mm256_add_pd(_mm256_cvtepi32_pd(d32), _mm256_mul_pd(vc, _mm256_cvtepi32_pd(s32)));
    __m128i out = _mm256_cvtpd_epi32(reduce(v, vp, vinv));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(dst.data() + i), out);
  }
  scalar::axpy_mod(dst.subspan(i), src.subspan(i), c, p);
}

void scale_mod(std::span<std::uint32_t> row, std::uint32_t c, std::uint32_t p) noexcept {
  if (p >= kMaxExactModulus) return scalar::scale_mod(row, c, p);
  const std::size_t n = row.size();
  const __m256d vp = _mm256_set1_pd(static_cast<double>(p));
  const __m256d vinv = _mm256_set1_pd(1.0 / static_cast<double>(p));
  const __m256d vc = _mm256_set1_pd(static_cast<double>(c));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m128i x32 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(row.data() + i));
    __m256d v = _mm256_mul_pd(vc, _mm256_cvtepi32_pd(x32));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(row.data() + i), _mm256_cvtpd_epi32(reduce(v, vp, vinv)));
  }
  scalar::scale_mod(row.subspan(i), c, p);
}

}  // namespace mjf::kernels::avx2
