#include "doctest.h"
#include "mjf/finite_field.hpp"
#include "mjf/instances.hpp"
#include "mjf/poly_dual.hpp"
#include "oracles.hpp"

using namespace mjf;

TEST_CASE("monomial basis: size and graded order") {
  for (std::size_t k = 1; k <= 3; ++k) {
    for (unsigned lam = 0; lam <= 6; ++lam) {
      MonomialBasis basis(k, lam);
      CHECK(basis.size() == oracle::binom(lam + static_cast<unsigned>(k), static_cast<unsigned>(k)));
      for (std::size_t i = 1; i < basis.size(); ++i) CHECK(graded_less(basis[i - 1], basis[i]));
      for (std::size_t i = 0; i < basis.size(); ++i) CHECK(basis.index_of(basis[i]) == i);
    }
  }
  const auto order2 = multi_indices_of_order(2, 2);
  REQUIRE(order2.size() == 3);
  CHECK(order2[0].exps == std::vector<unsigned>{2, 0});
  CHECK(order2[1].exps == std::vector<unsigned>{1, 1});
  CHECK(order2[2].exps == std::vector<unsigned>{0, 2});
  CHECK(!MonomialBasis(2, 2).index_of(MultiIndex{{3, 0}}));
}

TEST_CASE("Hasse functionals against explicit expansion of (u + t)^gamma") {
  Rng rng(41);
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
    PrimeField F(p);
    for (int rep = 0; rep < 25; ++rep) {
      const std::size_t k = 1 + rng.below(3);
      const unsigned lam = static_cast<unsigned>(rng.below(6));
      MonomialBasis basis(k, lam);
      std::vector<std::uint32_t> u(k);
      std::vector<std::int64_t> ui(k);
      for (std::size_t i = 0; i < k; ++i) ui[i] = u[i] = static_cast<std::uint32_t>(rng.below(p));
      const auto& beta = basis[rng.below(basis.size())];
      const auto phi = hasse_functional(F, u, beta, basis);
      for (std::size_t g = 0; g < basis.size(); ++g) {
        CHECK(phi.coeffs[g] == oracle::hasse_by_expansion(basis[g].exps, ui, beta.exps, p));
      }
    }
  }
}

TEST_CASE("evaluation functional is beta = 0") {
  PrimeField F(5);
  MonomialBasis basis(2, 2);
  const std::vector<std::uint32_t> u{2, 3};
  const auto ev = hasse_functional(F, u, MultiIndex{{0, 0}}, basis);
  // 1, x, y, x^2, xy, y^2 at (2, 3)
  CHECK(ev.coeffs == RowFp{1, 2, 3, 4, 1, 4});
}

TEST_CASE("plane charts invert and accept any direction basis") {
  Rng rng(42);
  for (std::uint64_t p : {2ull, 3ull, 5ull}) {
    PrimeField F(p);
    for (int rep = 0; rep < 30; ++rep) {
      const std::size_t n = 2 + rng.below(2), k = 1 + rng.below(n);
      const auto plane = random_plane(rng, F, n, k);
      auto dirs = plane.direction().basis().rows();
      for (auto& d : dirs) {
        const auto s = static_cast<std::uint32_t>(1 + rng.below(p - 1));
        for (auto& x : d) x = F.mul(x, s);
      }
      if (k >= 2) {
        for (std::size_t c = 0; c < n; ++c) dirs[1][c] = F.add(dirs[1][c], dirs[0][c]);
      }
      PlaneChart chart(plane, dirs);
      oracle::Mat od;
      for (const auto& d : dirs) od.emplace_back(d.begin(), d.end());
      for (const auto& x : plane.points()) {
        const auto t = chart.inverse(x);
        CHECK(chart(t) == x);
        const auto o = oracle::chart_coords(x, plane.base(), od, p);
        CHECK(std::vector<std::int64_t>(t.begin(), t.end()) == o);
      }
    }
  }
  PrimeField F(3);
  const auto line = canonicalize_plane(F, Point{{0, 0}}, {{1, 0}});
  CHECK_THROWS_AS(PlaneChart(line, {{0, 1}}), Error);
  CHECK_THROWS_AS(PlaneChart(line).inverse(Point{{0, 1}}), Error);
}

TEST_CASE("substitution matrix against symbolic expansion") {
  Rng rng(43);
  for (std::uint64_t p : {2ull, 3ull, 5ull}) {
    PrimeField F(p);
    for (int rep = 0; rep < 12; ++rep) {
      const std::size_t n = 2 + rng.below(2);
      const unsigned lam = 1 + static_cast<unsigned>(rng.below(3));
      // A random basis split into a k-plane and an (n-k)-plane through a point.
      std::vector<RowFp> vecs;
      do {
        vecs.assign(n, RowFp(n));
        for (auto& v : vecs) {
          for (auto& x : v) x = static_cast<std::uint32_t>(rng.below(p));
        }
      } while (rref_rank(MatrixFp(F, n, vecs)).rank != n);
      Point x{std::vector<std::uint32_t>(n)};
      for (auto& c : x.coords) c = static_cast<std::uint32_t>(rng.below(p));
      const std::size_t k = 1 + rng.below(n - 1);
      std::vector<RowFp> d1(vecs.begin(), vecs.begin() + static_cast<std::ptrdiff_t>(k));
      std::vector<RowFp> d2(vecs.begin() + static_cast<std::ptrdiff_t>(k), vecs.end());
      std::vector<PlaneChart> charts{PlaneChart(canonicalize_plane(F, x, d1), d1),
                                     PlaneChart(canonicalize_plane(F, x, d2), d2)};
      SubstitutionMatrix sub(F, x, charts, lam);
      MonomialBasis b1(k, lam), b2(n - k, lam);
      oracle::Mat od;
      for (const auto& v : vecs) od.emplace_back(v.begin(), v.end());
      std::vector<std::int64_t> base(x.coords.begin(), x.coords.end());
      for (const auto& m1 : b1.monomials()) {
        for (const auto& m2 : b2.monomials()) {
          const std::vector<MultiIndex> blocks{m1, m2};
          const auto col = sub.column(blocks);
          if (m1.order() + m2.order() > lam) {
            CHECK(col.is_zero());
            continue;
          }
          std::vector<unsigned> B = m1.exps;
          B.insert(B.end(), m2.exps.begin(), m2.exps.end());
          for (std::size_t g = 0; g < sub.basis().size(); ++g) {
            CHECK(col.coeffs[g] == oracle::substitution_by_expansion(sub.basis()[g].exps, base, od, B, p));
          }
        }
      }
    }
  }
}

TEST_CASE("lift and compose is linear in the derivative combinations") {
  PrimeField F(5);
  const Point x{{1, 2}};
  std::vector<PlaneChart> charts{PlaneChart(canonicalize_plane(F, x, {{1, 0}})),
                                 PlaneChart(canonicalize_plane(F, x, {{1, 1}}), {{1, 1}})};
  SubstitutionMatrix sub(F, x, charts, 3);
  const MultiIndex a{{1}}, b{{2}}, c{{0}};
  std::vector<DerivativeCombination> ops{{{{2, a}, {3, b}}}, {{{1, c}, {4, a}}}};
  const auto lifted = lift_and_compose(F, x, charts, ops, 3);
  RowFp expect(sub.basis().size(), 0);
  for (auto [c1, m1] : ops[0].terms) {
    for (auto [c2, m2] : ops[1].terms) {
      const std::vector<MultiIndex> blocks{m1, m2};
      const auto col = sub.column(blocks);
      for (std::size_t g = 0; g < expect.size(); ++g) expect[g] = F.add(expect[g], F.mul(F.mul(c1, c2), col.coeffs[g]));
    }
  }
  CHECK(lifted.coeffs == expect);
  std::vector<PlaneChart> parallel{charts[0], PlaneChart(canonicalize_plane(F, x, {{2, 0}}))};
  CHECK_THROWS_AS(SubstitutionMatrix(F, x, parallel, 2), Error);
}
