#include "mjf/tableau.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "mjf/error.hpp"

namespace mjf {

Handicap::Handicap(std::span<const Point> points, std::span<const std::int64_t> values) {
  if (points.size() != values.size()) throw Error("vanishing_tableau", "TAB_DIM", "handicap length mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) values_[points[i]] = values[i];
}

std::int64_t Handicap::at(const Point& p) const {
  auto it = values_.find(p);
  if (it == values_.end()) throw Error("vanishing_tableau", "TAB_DOMAIN", "point " + to_string(p) + " has no handicap");
  return it->second;
}

Handicap Handicap::shifted(std::int64_t c) const {
  Handicap out = *this;
  for (auto& [p, v] : out.values_) v += c;
  return out;
}

PriorityKey priority_key(const Point& p, unsigned r, const Handicap& alpha) {
  return {static_cast<std::int64_t>(r) - alpha.at(p), p};
}

std::strong_ordering priority_compare(const Point& p, unsigned r, const Point& q, unsigned r2,
                                      const Handicap& alpha) {
  auto a = priority_key(p, r, alpha);
  auto b = priority_key(q, r2, alpha);
  if (auto c = a <=> b; c != 0) return c;
  // Same key, same point: the pairs are equal only if the orders agree too.
  return r <=> r2;
}

std::size_t Tableau::count_of(const Point& p) const {
  auto it = std::lower_bound(points.begin(), points.end(), p);
  if (it == points.end() || *it != p) throw Error("vanishing_tableau", "TAB_DOMAIN", "point not in tableau");
  return counts[static_cast<std::size_t>(it - points.begin())];
}

std::vector<MultiIndex> Tableau::accepted(std::size_t i) const {
  std::vector<MultiIndex> out;
  for (const auto& tag : basis.tags()) {
    if (tag.point == i) out.push_back(tag.beta);
  }
  return out;
}

namespace {

struct Prepared {
  std::vector<Point> points;
  std::vector<std::int64_t> alpha;
};

Prepared prepare(const PlaneChart& chart, std::span<const Point> points, std::span<const std::int64_t> alpha) {
  if (points.size() != alpha.size()) throw Error("vanishing_tableau", "TAB_DIM", "handicap slice length mismatch");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return points[a] < points[b]; });
  Prepared out;
  for (auto i : order) {
    if (!chart.plane().contains(points[i])) {
      throw Error("vanishing_tableau", "TAB_OFFPLANE", "point " + to_string(points[i]) + " is not on the plane");
    }
    if (!out.points.empty() && out.points.back() == points[i]) {
      throw Error("vanishing_tableau", "TAB_DUP", "point " + to_string(points[i]) + " listed twice");
    }
    out.points.push_back(points[i]);
    out.alpha.push_back(alpha[i]);
  }
  return out;
}

void run_greedy(const PlaneChart& chart, const Prepared& prep, unsigned lambda, const TableauOptions& options,
                IncrementalBasis<BasisTag>& basis, std::vector<std::size_t>& counts) {
  const MonomialBasis monomials(chart.k(), lambda);
  // (key, point index, order); point index order is the lexicographic point order.
  std::vector<std::tuple<std::int64_t, std::size_t, unsigned>> pairs;
  for (std::size_t i = 0; i < prep.points.size(); ++i) {
    for (unsigned r = 0; r <= lambda; ++r) pairs.emplace_back(static_cast<std::int64_t>(r) - prep.alpha[i], i, r);
  }
  std::sort(pairs.begin(), pairs.end());
  std::mt19937_64 rng(options.shuffle_seed.value_or(0));
  counts.assign(prep.points.size(), 0);
  std::vector<std::vector<std::uint32_t>> coords(prep.points.size());
  for (std::size_t i = 0; i < prep.points.size(); ++i) coords[i] = chart.inverse(prep.points[i]);
  const PrimeField& field = chart.plane().direction().field();
  for (const auto& [key, i, r] : pairs) {
    if (basis.full()) break;
    auto betas = multi_indices_of_order(chart.k(), r);
    if (options.shuffle_seed) std::shuffle(betas.begin(), betas.end(), rng);
    for (auto& beta : betas) {
      auto phi = hasse_functional(field, coords[i], beta, monomials);
      if (basis.try_extend(phi.coeffs, BasisTag{i, r, std::move(beta)})) ++counts[i];
    }
  }
}

}  // namespace

Tableau build_tableau(const PlaneChart& chart, std::span<const Point> points, std::span<const std::int64_t> alpha,
                      unsigned lambda, const TableauOptions& options) {
  auto prep = prepare(chart, points, alpha);
  const PrimeField& field = chart.plane().direction().field();
  Tableau t{chart.plane(), prep.points, prep.alpha, lambda, {},
            IncrementalBasis<BasisTag>(field, binomial(lambda + chart.k(), chart.k()))};
  run_greedy(chart, prep, lambda, options, t.basis, t.counts);
  return t;
}

Tableau build_tableau(const AffinePlane& plane, std::span<const Point> points, const Handicap& alpha,
                      unsigned lambda) {
  std::vector<std::int64_t> slice;
  slice.reserve(points.size());
  for (const auto& p : points) slice.push_back(alpha.at(p));
  return build_tableau(PlaneChart(plane), points, slice, lambda);
}

std::vector<std::size_t> tableau_counts(const PlaneChart& chart, std::span<const Point> points,
                                        std::span<const std::int64_t> alpha, unsigned lambda) {
  auto prep = prepare(chart, points, alpha);
  IncrementalBasis<BasisTag> basis(chart.plane().direction().field(), binomial(lambda + chart.k(), chart.k()));
  std::vector<std::size_t> sorted_counts;
  run_greedy(chart, prep, lambda, {}, basis, sorted_counts);
  // Back to the caller's order.
  std::vector<std::size_t> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto it = std::lower_bound(prep.points.begin(), prep.points.end(), points[i]);
    out[i] = sorted_counts[static_cast<std::size_t>(it - prep.points.begin())];
  }
  return out;
}

}  // namespace mjf
