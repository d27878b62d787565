#include "mjf/poly_dual.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "mjf/error.hpp"

namespace mjf {

unsigned MultiIndex::order() const noexcept { return std::accumulate(exps.begin(), exps.end(), 0u); }

bool graded_less(const MultiIndex& a, const MultiIndex& b) {
  const unsigned da = a.order(), db = b.order();
  if (da != db) return da < db;
  return a.exps > b.exps;
}

std::vector<MultiIndex> multi_indices_of_order(std::size_t k, unsigned r) {
  std::vector<MultiIndex> out;
  MultiIndex cur{std::vector<unsigned>(k, 0)};
  // Descending lexicographic: give the earliest slot as much as possible first.
  std::function<void(std::size_t, unsigned)> fill = [&](std::size_t i, unsigned left) {
    if (i + 1 == k) {
      cur.exps[i] = left;
      out.push_back(cur);
      return;
    }
    for (unsigned e = left + 1; e-- > 0;) {
      cur.exps[i] = e;
      fill(i + 1, left - e);
    }
  };
  if (k == 0) {
    if (r == 0) out.push_back(cur);
    return out;
  }
  fill(0, r);
  return out;
}

MonomialBasis::MonomialBasis(std::size_t k, unsigned lambda) : k_(k), lambda_(lambda) {
  for (unsigned r = 0; r <= lambda; ++r) {
    for (auto& m : multi_indices_of_order(k, r)) monomials_.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < monomials_.size(); ++i) index_.emplace(monomials_[i].exps, i);
}

std::optional<std::size_t> MonomialBasis::index_of(const MultiIndex& m) const {
  auto it = index_.find(m.exps);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool DualFunctional::is_zero() const noexcept {
  return std::all_of(coeffs.begin(), coeffs.end(), [](std::uint32_t x) { return x == 0; });
}

DualFunctional hasse_functional(const PrimeField& field, std::span<const std::uint32_t> u, const MultiIndex& beta,
                                const MonomialBasis& basis) {
  if (u.size() != basis.k() || beta.size() != basis.k()) {
    throw Error("poly_dual", "PD_DIM", "point or multi-index does not match the basis variables");
  }
  DualFunctional phi{RowFp(basis.size(), 0)};
  for (std::size_t g = 0; g < basis.size(); ++g) {
    const auto& gamma = basis[g].exps;
    std::uint32_t v = 1 % field.modulus();
    for (std::size_t i = 0; i < gamma.size() && v != 0; ++i) {
      if (beta.exps[i] > gamma[i]) {
        v = 0;
        break;
      }
      v = field.mul(v, binomial_mod_p(gamma[i], beta.exps[i], field));
      v = field.mul(v, field.pow(u[i], gamma[i] - beta.exps[i]));
    }
    phi.coeffs[g] = v;
  }
  return phi;
}

namespace {

// Inverse of a small square matrix over F_p; empty result when singular.
std::vector<RowFp> invert(const PrimeField& f, std::vector<RowFp> a) {
  const std::size_t k = a.size();
  std::vector<RowFp> inv(k, RowFp(k, 0));
  for (std::size_t i = 0; i < k; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t sel = c;
    while (sel < k && a[sel][c] == 0) ++sel;
    if (sel == k) return {};
    std::swap(a[c], a[sel]);
    std::swap(inv[c], inv[sel]);
    const std::uint32_t s = f.inv(a[c][c]);
    kernels::scale_mod(a[c], s, f.modulus());
    kernels::scale_mod(inv[c], s, f.modulus());
    for (std::size_t r = 0; r < k; ++r) {
      if (r != c && a[r][c] != 0) {
        const std::uint32_t m = f.neg(a[r][c]);
        kernels::axpy_mod(a[r], a[c], m, f.modulus());
        kernels::axpy_mod(inv[r], inv[c], m, f.modulus());
      }
    }
  }
  return inv;
}

}  // namespace

PlaneChart::PlaneChart(AffinePlane plane)
    : PlaneChart(plane, plane.direction().basis().rows()) {}

PlaneChart::PlaneChart(AffinePlane plane, std::vector<RowFp> directions)
    : plane_(std::move(plane)), directions_(std::move(directions)) {
  const auto& dir = plane_.direction();
  const PrimeField& f = dir.field();
  if (directions_.size() != dir.k()) throw Error("poly_dual", "PD_CHART", "chart needs exactly k directions");
  std::vector<RowFp> change(dir.k(), RowFp(dir.k(), 0));
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    auto& u = directions_[i];
    if (u.size() != dir.n()) throw Error("poly_dual", "PD_CHART", "chart direction has wrong length");
    for (auto& x : u) x %= f.modulus();
    if (!dir.contains(u)) throw Error("poly_dual", "PD_CHART", "chart direction not parallel to the plane");
    for (std::size_t l = 0; l < dir.k(); ++l) change[i][l] = u[dir.pivots()[l]];
  }
  to_chart_ = invert(f, change);
  if (to_chart_.empty()) throw Error("poly_dual", "PD_CHART", "chart directions are dependent");
}

Point PlaneChart::operator()(std::span<const std::uint32_t> t) const {
  const PrimeField& f = plane_.direction().field();
  Point x = plane_.base();
  for (std::size_t i = 0; i < k(); ++i) kernels::axpy_mod(x.coords, directions_[i], t[i] % f.modulus(), f.modulus());
  return x;
}

std::vector<std::uint32_t> PlaneChart::inverse(const Point& x) const {
  if (!plane_.contains(x)) throw Error("poly_dual", "PD_OFFPLANE", "point " + to_string(x) + " is not on the plane");
  const auto& dir = plane_.direction();
  const PrimeField& f = dir.field();
  // Echelon coordinates c_l = (x - base)[pivot_l]; chart coordinates t = c * to_chart_.
  std::vector<std::uint32_t> t(k(), 0);
  for (std::size_t l = 0; l < k(); ++l) {
    const std::size_t col = dir.pivots()[l];
    const std::uint32_t c = f.sub(x.coords[col], plane_.base().coords[col]);
    for (std::size_t i = 0; i < k(); ++i) t[i] = f.add(t[i], f.mul(c, to_chart_[l][i]));
  }
  return t;
}

std::vector<DualFunctional> plane_functional_space(const PlaneChart& chart, const Point& p, unsigned r,
                                                   const MonomialBasis& basis) {
  const auto u = chart.inverse(p);
  const PrimeField& f = chart.plane().direction().field();
  std::vector<DualFunctional> out;
  for (const auto& beta : multi_indices_of_order(chart.k(), r)) out.push_back(hasse_functional(f, u, beta, basis));
  return out;
}

SubstitutionMatrix::SubstitutionMatrix(const PrimeField& field, const Point& p, std::span<const PlaneChart> charts,
                                       unsigned lambda)
    : field_(field), basis_(p.dim(), lambda) {
  const std::size_t n = p.dim();
  std::vector<RowFp> u;  // rows = t variables
  for (const auto& c : charts) {
    block_sizes_.push_back(c.k());
    for (const auto& d : c.directions()) u.push_back(d);
  }
  if (u.size() != n || rref_rank(MatrixFp(field, n, u)).rank != n) {
    throw Error("poly_dual", "LIFT_SINGULAR", "stacked plane directions do not form a basis of F^n");
  }
  const std::size_t size = basis_.size();
  // shift[B][l] = index of B + e_l, or size when the degree would exceed lambda.
  std::vector<std::vector<std::size_t>> shift(size, std::vector<std::size_t>(n, size));
  for (std::size_t b = 0; b < size; ++b) {
    for (std::size_t l = 0; l < n; ++l) {
      MultiIndex m = basis_[b];
      ++m.exps[l];
      if (auto idx = basis_.index_of(m)) shift[b][l] = *idx;
    }
  }
  matrix_.assign(size, RowFp(size, 0));
  matrix_[0][0] = 1 % field.modulus();  // gamma = 0
  for (std::size_t g = 1; g < size; ++g) {
    MultiIndex prev = basis_[g];
    const auto m = static_cast<std::size_t>(
        std::find_if(prev.exps.begin(), prev.exps.end(), [](unsigned e) { return e > 0; }) - prev.exps.begin());
    --prev.exps[m];
    const auto& src = matrix_[*basis_.index_of(prev)];
    auto& dst = matrix_[g];
    // Multiply by x_m = p_m + sum_l u[l][m] t_l.
    for (std::size_t b = 0; b < size; ++b) {
      if (src[b] == 0) continue;
      dst[b] = field.add(dst[b], field.mul(src[b], p.coords[m]));
      for (std::size_t l = 0; l < n; ++l) {
        if (shift[b][l] < size && u[l][m] != 0) {
          dst[shift[b][l]] = field.add(dst[shift[b][l]], field.mul(src[b], u[l][m]));
        }
      }
    }
  }
}

DualFunctional SubstitutionMatrix::column(std::span<const MultiIndex> blocks) const {
  if (blocks.size() != block_sizes_.size()) throw Error("poly_dual", "PD_DIM", "wrong number of blocks");
  MultiIndex joined;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (blocks[j].size() != block_sizes_[j]) throw Error("poly_dual", "PD_DIM", "block multi-index has wrong size");
    joined.exps.insert(joined.exps.end(), blocks[j].exps.begin(), blocks[j].exps.end());
  }
  DualFunctional out{RowFp(basis_.size(), 0)};
  auto idx = basis_.index_of(joined);
  if (!idx) return out;
  for (std::size_t g = 0; g < basis_.size(); ++g) out.coeffs[g] = matrix_[g][*idx];
  return out;
}

DualFunctional lift_and_compose(const PrimeField& field, const Point& p, std::span<const PlaneChart> charts,
                                std::span<const DerivativeCombination> ops, unsigned lambda) {
  if (ops.size() != charts.size()) throw Error("poly_dual", "PD_DIM", "one derivative combination per plane");
  SubstitutionMatrix sub(field, p, charts, lambda);
  DualFunctional out{RowFp(sub.basis().size(), 0)};
  std::vector<MultiIndex> blocks(ops.size());
  std::function<void(std::size_t, std::uint32_t)> expand = [&](std::size_t j, std::uint32_t coef) {
    if (coef == 0) return;
    if (j == ops.size()) {
      kernels::axpy_mod(out.coeffs, sub.column(blocks).coeffs, coef, field.modulus());
      return;
    }
    for (const auto& [c, beta] : ops[j].terms) {
      blocks[j] = beta;
      expand(j + 1, field.mul(coef, c % field.modulus()));
    }
  };
  expand(0, 1 % field.modulus());
  return out;
}

}  // namespace mjf
