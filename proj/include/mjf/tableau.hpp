#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mjf/geometry.hpp"
#include "mjf/linalg.hpp"
#include "mjf/poly_dual.hpp"

namespace mjf {

/// An integer offset per multijoint.
class Handicap {
 public:
  Handicap() = default;
  explicit Handicap(std::map<Point, std::int64_t> values) : values_(std::move(values)) {}
  /// Handicap on `points` with the given values, aligned by index.
  Handicap(std::span<const Point> points, std::span<const std::int64_t> values);

  /// Throws TAB_DOMAIN when p has no value.
  std::int64_t at(const Point& p) const;
  void set(const Point& p, std::int64_t v) { values_[p] = v; }
  bool contains(const Point& p) const { return values_.count(p) != 0; }
  const std::map<Point, std::int64_t>& values() const noexcept { return values_; }
  Handicap shifted(std::int64_t c) const;

  friend bool operator==(const Handicap&, const Handicap&) = default;

 private:
  std::map<Point, std::int64_t> values_;
};

/// (r - alpha_p, p): the priority order on (point, derivative order) pairs.
struct PriorityKey {
  std::int64_t primary;
  Point secondary;

  friend auto operator<=>(const PriorityKey&, const PriorityKey&) = default;
};

PriorityKey priority_key(const Point& p, unsigned r, const Handicap& alpha);
std::strong_ordering priority_compare(const Point& p, unsigned r, const Point& q, unsigned r2, const Handicap& alpha);

/// Which (point, order, generator) an accepted basis functional came from.
struct BasisTag {
  std::size_t point;  // index into Tableau::points
  unsigned order;
  MultiIndex beta;
};

struct TableauOptions {
  /// When set, generators inside each B_r(p) are fed in a seeded random
  /// order instead of graded order. The counts must not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

struct Tableau {
  AffinePlane plane;
  std::vector<Point> points;         // sorted
  std::vector<std::int64_t> alpha;   // aligned with points
  unsigned lambda = 0;
  std::vector<std::size_t> counts;   // tilde S per point, aligned with points
  IncrementalBasis<BasisTag> basis;

  std::size_t count_of(const Point& p) const;
  /// Generators accepted for point i, in acceptance order.
  std::vector<MultiIndex> accepted(std::size_t i) const;
};

/// Greedy construction of B(p, plane, alpha, lambda) for every given point:
/// (p, r) pairs are visited in priority order and the order-r Hasse
/// generators at p are kept while they extend the running basis.
/// Throws TAB_OFFPLANE for points off the plane and TAB_DUP for repeats.
Tableau build_tableau(const PlaneChart& chart, std::span<const Point> points, std::span<const std::int64_t> alpha,
                      unsigned lambda, const TableauOptions& options = {});
Tableau build_tableau(const AffinePlane& plane, std::span<const Point> points, const Handicap& alpha, unsigned lambda);

/// tilde S only, without keeping the basis around.
std::vector<std::size_t> tableau_counts(const PlaneChart& chart, std::span<const Point> points,
                                        std::span<const std::int64_t> alpha, unsigned lambda);

}  // namespace mjf
