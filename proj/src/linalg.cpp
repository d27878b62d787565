#include "mjf/linalg.hpp"

namespace mjf {

MatrixFp::MatrixFp(PrimeField field, std::size_t ncols, std::vector<RowFp> rows)
    : field_(field), ncols_(ncols) {
  rows_.reserve(rows.size());
  for (auto& r : rows) add_row(std::move(r));
}

void MatrixFp::add_row(RowFp row) {
  if (row.size() != ncols_) {
    throw Error("exact_linalg", "LA_DIM",
                "row length " + std::to_string(row.size()) + " != " + std::to_string(ncols_));
  }
  const std::uint32_t p = field_.modulus();
  for (auto x : row) {
    if (x >= p) throw Error("exact_linalg", "LA_ENTRY", "entry " + std::to_string(x) + " not reduced mod p");
  }
  rows_.push_back(std::move(row));
}

Echelon rref_rank(const MatrixFp& m) {
  const PrimeField& f = m.field();
  const std::uint32_t p = f.modulus();
  std::vector<RowFp> a = m.rows();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.ncols() && r < a.size(); ++c) {
    std::size_t sel = r;
    while (sel < a.size() && a[sel][c] == 0) ++sel;
    if (sel == a.size()) continue;
    std::swap(a[r], a[sel]);
    kernels::scale_mod(a[r], f.inv(a[r][c]), p);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i != r && a[i][c] != 0) kernels::axpy_mod(a[i], a[r], f.neg(a[i][c]), p);
    }
    pivots.push_back(c);
    ++r;
  }
  a.resize(r);
  return {MatrixFp(f, m.ncols(), std::move(a)), r, std::move(pivots)};
}

std::vector<RowFp> kernel(const MatrixFp& m) {
  const auto e = rref_rank(m);
  const PrimeField& f = m.field();
  std::vector<bool> is_pivot(m.ncols(), false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<RowFp> basis;
  for (std::size_t free = 0; free < m.ncols(); ++free) {
    if (is_pivot[free]) continue;
    RowFp v(m.ncols(), 0);
    v[free] = 1;
    for (std::size_t i = 0; i < e.rank; ++i) v[e.pivots[i]] = f.neg(e.echelon.row(i)[free]);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace mjf
