// Sparse exact matrices with opaque basis labels, and the rank / kernel /
// homology-dimension computations built on them.
//
// A matrix represents a linear map: columns are indexed by an ordered list of
// domain labels, rows by an ordered list of target labels. Entries are stored
// as signed integers and interpreted in the chosen field when a computation
// runs, so one matrix can be ranked over GF(q) and over the rationals and the
// results compared.
//
// The eliminator maintains a reduced row echelon basis of the processed row
// space. Because a reduced basis vanishes at every other pivot column, an
// incoming sparse row only ever engages the pivots sitting under its original
// support: reduction cost is O(support * width), no fill-in cascade. The
// reduced basis of a subspace is unique, so ranks, pivot columns and kernels
// are canonical regardless of row order, batching or thread count.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "segre/field.hpp"

namespace segre {

// Opaque basis label. Callers encode whatever structure they like; ordering
// of the label vectors passed at construction fixes the basis enumeration.
using Label = std::uint64_t;

struct Triplet {
  Label row;
  Label col;
  std::int64_t value;
};

class SparseExactMatrix {
 public:
  // Duplicate (row, col) pairs are summed; entries summing to zero are not
  // stored. Triplet labels must appear in the corresponding label vectors.
  SparseExactMatrix(std::vector<Label> row_labels, std::vector<Label> col_labels,
                    const std::vector<Triplet>& entries);

  std::size_t n_rows() const { return row_labels_.size(); }
  std::size_t n_cols() const { return col_labels_.size(); }
  std::size_t n_entries() const { return col_idx_.size(); }
  const std::vector<Label>& row_labels() const { return row_labels_; }
  const std::vector<Label>& col_labels() const { return col_labels_; }

  // Rank over the field. Free to transpose internally (rank is symmetric);
  // deterministic for a given matrix and field.
  std::size_t rank(const FieldSpec& field) const;

  // Basis of the null space {x : Ax = 0} over the field, one vector per
  // non-pivot column, in column order. Vectors are returned with integer
  // coordinates (denominators cleared and content removed in the rational
  // case), paired with their column labels. Canonical for a given matrix.
  struct KernelVector {
    std::vector<std::pair<Label, std::int64_t>> coords;  // col label -> coefficient
  };
  std::vector<KernelVector> kernel_basis(const FieldSpec& field) const;

  // Entries of this * other (matrix composition: this after other), reduced
  // over the field; requires this->col_labels() == other.row_labels()
  // (LabelMismatch otherwise). Returned triplets omit zeros.
  std::vector<Triplet> compose(const SparseExactMatrix& other, const FieldSpec& field) const;

  bool is_zero(const FieldSpec& field) const;

  // Raw storage access (row-major CSR), mainly for tests and streaming.
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& col_idx() const { return col_idx_; }
  const std::vector<std::int64_t>& values() const { return values_; }

 private:
  std::vector<Label> row_labels_;
  std::vector<Label> col_labels_;
  std::vector<std::size_t> row_ptr_;  // size n_rows + 1
  std::vector<std::uint32_t> col_idx_;
  std::vector<std::int64_t> values_;
};

// dim ker(d_out) - rank(d_in) for a two-step complex
//   prev --d_in--> mid --d_out--> next,
// where d_in maps prev into mid (rows of d_in = mid labels) and d_out maps
// mid into next (columns of d_out = mid labels). Throws LabelMismatch if the
// middle bases disagree, CompositionNonzero if d_out . d_in != 0 over the
// field. Either map may be absent (nullptr) when the complex ends.
std::size_t homology_dim(const SparseExactMatrix* d_in, const SparseExactMatrix* d_out,
                         const FieldSpec& field);

// Streaming eliminator used by rank/kernel; exposed for callers that build
// rows on the fly instead of materializing triplets (the Koszul engine).
class RowEliminator {
 public:
  RowEliminator(std::size_t width, const FieldSpec& field);
  ~RowEliminator();
  RowEliminator(const RowEliminator&) = delete;
  RowEliminator& operator=(const RowEliminator&) = delete;

  // Feed one row, sparse (column index, value) pairs with indices < width.
  // Repeated indices within a row are summed. Returns true if the row was
  // independent of everything seen so far (rank grew).
  bool consume(const std::pair<std::uint32_t, std::int64_t>* entries, std::size_t n);

  std::size_t rank() const;
  bool saturated() const;  // rank == width, nothing more can grow

  // Pivot columns in increasing order, and the reduced rows as integer
  // vectors (GF: canonical representatives; rational: content-normalized,
  // positive leading coefficient). Row i has its pivot at pivot_cols()[i].
  std::vector<std::uint32_t> pivot_cols() const;
  std::vector<std::int64_t> reduced_row(std::size_t i) const;

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace segre
