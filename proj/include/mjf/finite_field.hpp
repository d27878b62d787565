#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace mjf {

/// The prime field F_p. Moduli are restricted to p < 2^31 so that a product
/// of two canonical representatives fits in 64 bits.
class PrimeField {
 public:
  using value_type = std::uint32_t;

  explicit PrimeField(std::uint64_t p);

  std::uint32_t modulus() const noexcept { return p_; }

  std::uint32_t reduce(std::int64_t x) const noexcept {
    std::int64_t r = x % static_cast<std::int64_t>(p_);
    return static_cast<std::uint32_t>(r < 0 ? r + p_ : r);
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept {
    std::uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept {
    return a >= b ? a - b : a + p_ - b;
  }
  std::uint32_t neg(std::uint32_t a) const noexcept { return a == 0 ? 0 : p_ - a; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p_);
  }
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept;
  /// Throws mjf::Error (code FF_INV0) on zero.
  std::uint32_t inv(std::uint32_t a) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint32_t p_;
};

bool is_prime(std::uint64_t n) noexcept;

/// An element of a prime field. Arithmetic between elements of different
/// fields throws.
class FieldElement {
 public:
  FieldElement(const PrimeField& field, std::int64_t value)
      : value_(field.reduce(value)), p_(field.modulus()) {}

  std::uint32_t value() const noexcept { return value_; }
  PrimeField field() const { return PrimeField(p_); }

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator-() const;
  FieldElement inv() const;
  FieldElement pow(std::uint64_t e) const;

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.p_ == b.p_ && a.value_ == b.value_;
  }
  friend std::ostream& operator<<(std::ostream& os, const FieldElement& x) {
    return os << x.value_;
  }

 private:
  FieldElement(std::uint32_t value, std::uint32_t p, int) : value_(value), p_(p) {}
  void check_same(const FieldElement& o) const;

  std::uint32_t value_;
  std::uint32_t p_;
};

/// C(n, k) mod p via Lucas' theorem. Zero when k > n.
std::uint32_t binomial_mod_p(std::uint64_t n, std::uint64_t k, const PrimeField& field);

/// Exact C(n, k) for small arguments; throws on overflow of 64 bits.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace mjf
