#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace augip {

using Vector = Eigen::VectorXd;
using Index = int;

// Errors thrown across the library.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unordered (row, col, value) entries used to assemble a sparse matrix.
struct Triplets {
  Index nrows = 0;
  Index ncols = 0;
  struct Entry {
    Index row;
    Index col;
    double value;
  };
  std::vector<Entry> entries;

  Triplets() = default;
  Triplets(Index m, Index n) : nrows(m), ncols(n) {}
  void add(Index r, Index c, double v) { entries.push_back({r, c, v}); }
};

/// Compressed sparse-column matrix. Within each column row indices are
/// strictly increasing and no duplicates are stored. Explicit zeros are kept.
struct SparseColMatrix {
  Index nrows = 0;
  Index ncols = 0;
  std::vector<Index> colptr{0};
  std::vector<Index> rowind;
  std::vector<double> values;

  SparseColMatrix() = default;
  SparseColMatrix(Index m, Index n)
      : nrows(m), ncols(n), colptr(static_cast<size_t>(n) + 1, 0) {}

  Index nnz() const { return colptr.empty() ? 0 : colptr.back(); }
};

/// Symmetric matrix stored as its lower triangle (diagonal included);
/// the upper triangle is the implicit mirror.
struct SymLowerMatrix {
  Index order = 0;
  SparseColMatrix storage;

  SymLowerMatrix() = default;
  explicit SymLowerMatrix(SparseColMatrix lower)
      : order(lower.nrows), storage(std::move(lower)) {
    if (storage.nrows != storage.ncols)
      throw StructuralError("symmetric storage must be square");
  }
};

SparseColMatrix from_triplets(const Triplets& t);

Vector spmv(const SparseColMatrix& A, const Vector& x);
Vector spmv_transpose(const SparseColMatrix& A, const Vector& y);
Vector sym_spmv(const SymLowerMatrix& K, const Vector& v);

/// Symmetric permutation P*K*P^T; p[i] is the new index of old index i.
SymLowerMatrix sym_permute(const SymLowerMatrix& K, const std::vector<Index>& p);

Eigen::MatrixXd to_dense(const SparseColMatrix& A);
Eigen::MatrixXd to_dense(const SymLowerMatrix& K);  // full symmetric expansion

// Matrix Market coordinate format, 1-based indices.
void write_matrix_market(std::ostream& os, const SparseColMatrix& A);
void write_matrix_market(std::ostream& os, const SymLowerMatrix& K);
SparseColMatrix read_matrix_market(std::istream& is);
SymLowerMatrix read_matrix_market_symmetric(std::istream& is);

}  // namespace augip
