#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mjf/finite_field.hpp"
#include "mjf/geometry.hpp"
#include "mjf/linalg.hpp"

namespace mjf {

struct MultiIndex {
  std::vector<unsigned> exps;

  unsigned order() const noexcept;
  std::size_t size() const noexcept { return exps.size(); }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Graded order: lower total degree first, then descending lexicographic
/// within a degree, so x1^2 < x1 x2 < x2^2.
bool graded_less(const MultiIndex& a, const MultiIndex& b);

/// All |beta| = r in k variables, in graded order.
std::vector<MultiIndex> multi_indices_of_order(std::size_t k, unsigned r);

/// Monomials of F_lambda[x_1..x_k] in graded order; size C(lambda+k, k).
class MonomialBasis {
 public:
  MonomialBasis(std::size_t k, unsigned lambda);

  std::size_t k() const noexcept { return k_; }
  unsigned lambda() const noexcept { return lambda_; }
  std::size_t size() const noexcept { return monomials_.size(); }
  const std::vector<MultiIndex>& monomials() const noexcept { return monomials_; }
  const MultiIndex& operator[](std::size_t i) const { return monomials_.at(i); }
  std::optional<std::size_t> index_of(const MultiIndex& m) const;

 private:
  std::size_t k_;
  unsigned lambda_;
  std::vector<MultiIndex> monomials_;
  std::map<std::vector<unsigned>, std::size_t> index_;
};

/// A linear functional on F_lambda[x_1..x_k], stored by its values on the
/// monomial basis: <phi, f> = sum_gamma coeffs[gamma] * f_gamma.
struct DualFunctional {
  RowFp coeffs;

  bool is_zero() const noexcept;
  friend bool operator==(const DualFunctional&, const DualFunctional&) = default;
};

/// f -> D^beta f(u), the Hasse derivative at u. Entry gamma is
/// C(gamma, beta) u^(gamma - beta), zero unless beta <= gamma.
DualFunctional hasse_functional(const PrimeField& field, std::span<const std::uint32_t> u, const MultiIndex& beta,
                                const MonomialBasis& basis);

/// Affine coordinates t -> base + sum t_i u_i on a plane.
class PlaneChart {
 public:
  /// Chart from the canonical echelon basis of the plane's direction.
  explicit PlaneChart(AffinePlane plane);
  /// Chart from any basis of the plane's direction space (PD_CHART otherwise).
  PlaneChart(AffinePlane plane, std::vector<RowFp> directions);

  const AffinePlane& plane() const noexcept { return plane_; }
  const std::vector<RowFp>& directions() const noexcept { return directions_; }
  std::size_t k() const noexcept { return directions_.size(); }

  Point operator()(std::span<const std::uint32_t> t) const;
  /// Intrinsic coordinates of a point on the plane (PD_OFFPLANE otherwise).
  std::vector<std::uint32_t> inverse(const Point& x) const;

 private:
  AffinePlane plane_;
  std::vector<RowFp> directions_;
  std::vector<RowFp> to_chart_;  // inverse of the k x k change of basis from the echelon rows
};

/// Generators of B_r(p, plane, lambda): the Hasse functionals of order r at
/// p in the chart's coordinates, in graded order of beta.
std::vector<DualFunctional> plane_functional_space(const PlaneChart& chart, const Point& p, unsigned r,
                                                   const MonomialBasis& basis);

/// M[gamma][B] = coefficient of t^B in (p + U t)^gamma, where U stacks the
/// chart directions of d planes through p into an invertible n x n matrix.
/// Column B is the functional f -> D^B g(0) for g(t) = f(p + U t).
class SubstitutionMatrix {
 public:
  /// Throws LIFT_SINGULAR when the stacked directions are not a basis.
  SubstitutionMatrix(const PrimeField& field, const Point& p, std::span<const PlaneChart> charts, unsigned lambda);

  const MonomialBasis& basis() const noexcept { return basis_; }
  /// Functional for the block multi-index (beta_1, ..., beta_d); zero if its order exceeds lambda.
  DualFunctional column(std::span<const MultiIndex> blocks) const;

 private:
  PrimeField field_;
  MonomialBasis basis_;
  std::vector<std::size_t> block_sizes_;
  std::vector<RowFp> matrix_;  // matrix_[gamma][B]
};

/// A linear combination sum c * D^beta of Hasse derivatives in one plane's chart.
struct DerivativeCombination {
  std::vector<std::pair<std::uint32_t, MultiIndex>> terms;
};

/// The functional f -> (D_1 ... D_d f)(p) on F_lambda[x_1..x_n], each D_j a
/// combination of Hasse derivatives along plane j's chart directions.
DualFunctional lift_and_compose(const PrimeField& field, const Point& p, std::span<const PlaneChart> charts,
                                std::span<const DerivativeCombination> ops, unsigned lambda);

}  // namespace mjf
