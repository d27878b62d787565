#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mjf/error.hpp"
#include "mjf/finite_field.hpp"
#include "mjf/kernels.hpp"

namespace mjf {

using RowFp = std::vector<std::uint32_t>;

/// Dense matrix over F_p stored as a list of rows.
class MatrixFp {
 public:
  MatrixFp(PrimeField field, std::size_t ncols) : field_(field), ncols_(ncols) {}
  MatrixFp(PrimeField field, std::size_t ncols, std::vector<RowFp> rows);

  void add_row(RowFp row);

  const PrimeField& field() const noexcept { return field_; }
  std::size_t ncols() const noexcept { return ncols_; }
  std::size_t nrows() const noexcept { return rows_.size(); }
  const std::vector<RowFp>& rows() const noexcept { return rows_; }
  const RowFp& row(std::size_t i) const { return rows_.at(i); }

  friend bool operator==(const MatrixFp& a, const MatrixFp& b) {
    return a.field_ == b.field_ && a.ncols_ == b.ncols_ && a.rows_ == b.rows_;
  }

 private:
  PrimeField field_;
  std::size_t ncols_;
  std::vector<RowFp> rows_;
};

struct Echelon {
  MatrixFp echelon;  // nonzero rows of the reduced row-echelon form
  std::size_t rank;
  std::vector<std::size_t> pivots;
};

/// Reduced row-echelon form; the result is unique for a given row space.
Echelon rref_rank(const MatrixFp& m);

/// Basis of {x : M x = 0}, one vector per free column.
std::vector<RowFp> kernel(const MatrixFp& m);

/// Row-space basis grown one candidate at a time. Accepted rows are kept in
/// reduced echelon form and each carries the tag it was accepted with.
template <class Tag>
class IncrementalBasis {
 public:
  IncrementalBasis(PrimeField field, std::size_t dim) : field_(field), dim_(dim) {}

  /// Accepts the candidate iff it is independent of the current rows.
  bool try_extend(std::span<const std::uint32_t> candidate, Tag tag) {
    if (candidate.size() != dim_) {
      throw Error("exact_linalg", "LA_DIM",
                  "candidate length " + std::to_string(candidate.size()) + " != " + std::to_string(dim_));
    }
    if (full()) return false;
    scratch_.assign(candidate.begin(), candidate.end());
    reduce(scratch_);
    auto it = std::find_if(scratch_.begin(), scratch_.end(), [](std::uint32_t x) { return x != 0; });
    if (it == scratch_.end()) return false;
    const auto pivot = static_cast<std::size_t>(it - scratch_.begin());
    const std::uint32_t p = field_.modulus();
    kernels::scale_mod(scratch_, field_.inv(*it), p);
    for (auto& row : rows_) {
      if (row[pivot] != 0) kernels::axpy_mod(row, scratch_, field_.neg(row[pivot]), p);
    }
    rows_.push_back(scratch_);
    pivots_.push_back(pivot);
    tags_.push_back(std::move(tag));
    return true;
  }

  /// True when v lies in the current span.
  bool contains(std::span<const std::uint32_t> v) const {
    RowFp w(v.begin(), v.end());
    reduce(w);
    return std::all_of(w.begin(), w.end(), [](std::uint32_t x) { return x == 0; });
  }

  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool full() const noexcept { return rows_.size() == dim_; }
  const std::vector<Tag>& tags() const noexcept { return tags_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  /// Accepted rows sorted by pivot column, i.e. the reduced echelon form.
  MatrixFp echelon() const {
    std::vector<std::size_t> order(rows_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return pivots_[a] < pivots_[b]; });
    MatrixFp m(field_, dim_);
    for (auto i : order) m.add_row(rows_[i]);
    return m;
  }

 private:
  void reduce(RowFp& v) const {
    const std::uint32_t p = field_.modulus();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::uint32_t c = v[pivots_[i]];
      if (c != 0) kernels::axpy_mod(v, rows_[i], field_.neg(c), p);
    }
  }

  PrimeField field_;
  std::size_t dim_;
  std::vector<RowFp> rows_;
  std::vector<std::size_t> pivots_;
  std::vector<Tag> tags_;
  RowFp scratch_;
};

}  // namespace mjf
