#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mjf/finite_field.hpp"
#include "mjf/linalg.hpp"

namespace mjf {

/// A point of F_p^n. Points are totally ordered lexicographically on their
/// canonical coordinates; this is the order used for J everywhere.
struct Point {
  std::vector<std::uint32_t> coords;

  std::size_t dim() const noexcept { return coords.size(); }
  friend auto operator<=>(const Point&, const Point&) = default;
  friend bool operator==(const Point&, const Point&) = default;
};

std::string to_string(const Point& p);

/// A k-dimensional linear subspace of F_p^n, represented by its unique
/// reduced row-echelon basis.
class GrassmannElement {
 public:
  /// Throws GEO_DEP when the spanning vectors are dependent.
  static GrassmannElement from_spanning(const PrimeField& field, std::size_t n, std::vector<RowFp> vectors);

  std::size_t k() const noexcept { return basis_.nrows(); }
  std::size_t n() const noexcept { return basis_.ncols(); }
  const PrimeField& field() const noexcept { return basis_.field(); }
  const MatrixFp& basis() const noexcept { return basis_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  /// Subtracts multiples of the basis rows so that v vanishes at every pivot.
  RowFp reduce(RowFp v) const;
  bool contains(const RowFp& v) const;

  friend bool operator==(const GrassmannElement& a, const GrassmannElement& b) { return a.basis_ == b.basis_; }
  friend std::strong_ordering operator<=>(const GrassmannElement& a, const GrassmannElement& b);

 private:
  GrassmannElement(MatrixFp basis, std::vector<std::size_t> pivots)
      : basis_(std::move(basis)), pivots_(std::move(pivots)) {}

  MatrixFp basis_;
  std::vector<std::size_t> pivots_;
};

/// An affine k-plane base + V. The base is the lexicographically least point
/// of the plane, so set-equal planes have identical representations.
class AffinePlane {
 public:
  AffinePlane(Point base, GrassmannElement direction);

  const Point& base() const noexcept { return base_; }
  const GrassmannElement& direction() const noexcept { return direction_; }
  std::size_t k() const noexcept { return direction_.k(); }
  std::size_t n() const noexcept { return direction_.n(); }

  bool contains(const Point& p) const;
  /// All p^k points, in lexicographic order.
  std::vector<Point> points() const;

  friend bool operator==(const AffinePlane&, const AffinePlane&) = default;
  friend std::strong_ordering operator<=>(const AffinePlane& a, const AffinePlane& b);

 private:
  Point base_;
  GrassmannElement direction_;
};

std::string to_string(const AffinePlane& plane);

/// Throws GEO_DEP for dependent directions and GEO_DIM for length mismatches.
AffinePlane canonicalize_plane(const PrimeField& field, const Point& base, std::vector<RowFp> directions);

struct Configuration {
  PrimeField field;
  std::size_t n = 0;
  std::vector<std::size_t> k_list;
  std::vector<std::vector<AffinePlane>> families;

  std::size_t d() const noexcept { return k_list.size(); }
  /// Throws GEO_CONFIG / GEO_KSUM on violated invariants.
  void validate() const;
};

/// Discrete wedge: 1 iff the subspaces jointly span F_p^n. Requires the
/// dimensions to sum to n (GEO_DIM otherwise).
int wedge(std::span<const GrassmannElement> spaces);

/// Multijoint kernel: 1 iff p lies on every plane and their directions wedge to 1.
int delta_kernel(const Point& p, std::span<const AffinePlane> planes);

/// One plane index per family.
using Witness = std::vector<std::size_t>;

struct Multijoints {
  std::vector<Point> points;                   // J, lexicographically sorted
  std::vector<std::vector<Witness>> witnesses;  // every tuple with delta = 1, per point

  std::size_t size() const noexcept { return points.size(); }
  std::optional<std::size_t> index_of(const Point& p) const;
};

Multijoints detect_multijoints(const Configuration& cfg);

/// q-binomial [n choose k]_q.
std::uint64_t gaussian_binomial(std::uint64_t n, std::uint64_t k, std::uint64_t q);

constexpr std::uint64_t kDefaultPlaneCap = 1'000'000;

/// Every affine k-plane of F_p^n exactly once, sorted. Throws GEO_CAP when the
/// count would exceed the cap.
std::vector<AffinePlane> enumerate_planes(const PrimeField& field, std::size_t n, std::size_t k,
                                          std::uint64_t cap = kDefaultPlaneCap);

/// All k-subspaces of F_p^n.
std::vector<GrassmannElement> enumerate_grassmannian(const PrimeField& field, std::size_t n, std::size_t k);

/// Connected components of J (or of the subset flagged in `subset`) under
/// "some plane contributes to both points". Components are sorted by their
/// least point; members are J indices in increasing order.
std::vector<std::vector<std::size_t>> connected_components(const Multijoints& joints,
                                                           const std::vector<bool>& subset = {});

}  // namespace mjf
