#include "mjf/finite_field.hpp"

#include <limits>
#include <string>

#include "mjf/error.hpp"

namespace mjf {

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(0) {
  if (p >= (std::uint64_t{1} << 31)) {
    throw Error("finite_field", "FF_RANGE", "modulus " + std::to_string(p) + " exceeds 2^31");
  }
  if (!is_prime(p)) {
    throw Error("finite_field", "FF_PRIME", "modulus " + std::to_string(p) + " is not prime");
  }
  p_ = static_cast<std::uint32_t>(p);
}

std::uint32_t PrimeField::pow(std::uint32_t a, std::uint64_t e) const noexcept {
  std::uint32_t result = 1 % p_;
  std::uint32_t base = a % p_;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

std::uint32_t PrimeField::inv(std::uint32_t a) const {
  if (a % p_ == 0) throw Error("finite_field", "FF_INV0", "inverse of zero");
  // Extended Euclid on (a, p).
  std::int64_t r0 = p_, r1 = a, t0 = 0, t1 = 1;
  while (r1 != 0) {
    std::int64_t q = r0 / r1;
    std::int64_t r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    std::int64_t t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  return reduce(t0);
}

void FieldElement::check_same(const FieldElement& o) const {
  if (p_ != o.p_) {
    throw Error("finite_field", "FF_MIXED",
                "operands from F_" + std::to_string(p_) + " and F_" + std::to_string(o.p_));
  }
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same(o);
  return {PrimeField(p_).add(value_, o.value_), p_, 0};
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same(o);
  return {PrimeField(p_).sub(value_, o.value_), p_, 0};
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same(o);
  return {PrimeField(p_).mul(value_, o.value_), p_, 0};
}

FieldElement FieldElement::operator-() const { return {value_ == 0 ? 0 : p_ - value_, p_, 0}; }

FieldElement FieldElement::inv() const { return {PrimeField(p_).inv(value_), p_, 0}; }

FieldElement FieldElement::pow(std::uint64_t e) const { return {PrimeField(p_).pow(value_, e), p_, 0}; }

namespace {

// C(n, k) mod p for n, k < p.
std::uint32_t small_binomial(std::uint32_t n, std::uint32_t k, const PrimeField& f) {
  if (k > n) return 0;
  std::uint32_t num = 1, den = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    num = f.mul(num, n - i);
    den = f.mul(den, i + 1);
  }
  return f.mul(num, f.inv(den));
}

}  // namespace

std::uint32_t binomial_mod_p(std::uint64_t n, std::uint64_t k, const PrimeField& field) {
  if (k > n) return 0;
  const std::uint64_t p = field.modulus();
  std::uint32_t result = 1 % field.modulus();
  while (n > 0 || k > 0) {
    auto nd = static_cast<std::uint32_t>(n % p);
    auto kd = static_cast<std::uint32_t>(k % p);
    if (kd > nd) return 0;
    result = field.mul(result, small_binomial(nd, kd, field));
    n /= p;
    k /= p;
  }
  return result;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw Error("finite_field", "FF_OVERFLOW", "binomial overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace mjf
