#include "augip/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace augip {

SparseColMatrix from_triplets(const Triplets& t) {
  for (const auto& e : t.entries) {
    if (e.row < 0 || e.row >= t.nrows || e.col < 0 || e.col >= t.ncols)
      throw StructuralError("triplet index out of range");
    if (!std::isfinite(e.value)) throw DataError("non-finite triplet value");
  }
  SparseColMatrix A(t.nrows, t.ncols);
  std::vector<Index> count(t.ncols, 0);
  for (const auto& e : t.entries) ++count[e.col];
  for (Index j = 0; j < t.ncols; ++j) A.colptr[j + 1] = A.colptr[j] + count[j];
  std::vector<Index> next(A.colptr.begin(), A.colptr.end() - 1);
  std::vector<Index> rows(t.entries.size());
  std::vector<double> vals(t.entries.size());
  for (const auto& e : t.entries) {
    Index k = next[e.col]++;
    rows[k] = e.row;
    vals[k] = e.value;
  }
  // sort each column by row, summing duplicates
  A.rowind.reserve(rows.size());
  A.values.reserve(vals.size());
  std::vector<Index> newptr(t.ncols + 1, 0);
  for (Index j = 0; j < t.ncols; ++j) {
    Index lo = A.colptr[j], hi = A.colptr[j + 1];
    std::vector<Index> order(hi - lo);
    std::iota(order.begin(), order.end(), lo);
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return rows[a] < rows[b]; });
    for (Index k : order) {
      if (!A.rowind.empty() && static_cast<Index>(A.rowind.size()) > newptr[j] &&
          A.rowind.back() == rows[k]) {
        A.values.back() += vals[k];
      } else {
        A.rowind.push_back(rows[k]);
        A.values.push_back(vals[k]);
      }
    }
    newptr[j + 1] = static_cast<Index>(A.rowind.size());
  }
  A.colptr = std::move(newptr);
  return A;
}

Vector spmv(const SparseColMatrix& A, const Vector& x) {
  if (x.size() != A.ncols) throw StructuralError("spmv: dimension mismatch");
  Vector y = Vector::Zero(A.nrows);
  for (Index j = 0; j < A.ncols; ++j)
    for (Index k = A.colptr[j]; k < A.colptr[j + 1]; ++k)
      y[A.rowind[k]] += A.values[k] * x[j];
  return y;
}

Vector spmv_transpose(const SparseColMatrix& A, const Vector& y) {
  if (y.size() != A.nrows)
    throw StructuralError("spmv_transpose: dimension mismatch");
  Vector x = Vector::Zero(A.ncols);
  for (Index j = 0; j < A.ncols; ++j) {
    double s = 0;
    for (Index k = A.colptr[j]; k < A.colptr[j + 1]; ++k)
      s += A.values[k] * y[A.rowind[k]];
    x[j] = s;
  }
  return x;
}

Vector sym_spmv(const SymLowerMatrix& K, const Vector& v) {
  if (v.size() != K.order) throw StructuralError("sym_spmv: dimension mismatch");
  const SparseColMatrix& S = K.storage;
  Vector y = Vector::Zero(K.order);
  for (Index j = 0; j < S.ncols; ++j) {
    for (Index k = S.colptr[j]; k < S.colptr[j + 1]; ++k) {
      Index i = S.rowind[k];
      double a = S.values[k];
      y[i] += a * v[j];
      if (i != j) y[j] += a * v[i];
    }
  }
  return y;
}

SymLowerMatrix sym_permute(const SymLowerMatrix& K, const std::vector<Index>& p) {
  if (static_cast<Index>(p.size()) != K.order)
    throw StructuralError("sym_permute: permutation length mismatch");
  std::vector<char> seen(p.size(), 0);
  for (Index pi : p) {
    if (pi < 0 || pi >= K.order || seen[pi])
      throw StructuralError("sym_permute: not a permutation");
    seen[pi] = 1;
  }
  Triplets t(K.order, K.order);
  const SparseColMatrix& S = K.storage;
  for (Index j = 0; j < S.ncols; ++j) {
    for (Index k = S.colptr[j]; k < S.colptr[j + 1]; ++k) {
      Index i = S.rowind[k];
      Index pi = p[i], pj = p[j];
      t.add(std::max(pi, pj), std::min(pi, pj), S.values[k]);
    }
  }
  return SymLowerMatrix(from_triplets(t));
}

Eigen::MatrixXd to_dense(const SparseColMatrix& A) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.nrows, A.ncols);
  for (Index j = 0; j < A.ncols; ++j)
    for (Index k = A.colptr[j]; k < A.colptr[j + 1]; ++k)
      M(A.rowind[k], j) += A.values[k];
  return M;
}

Eigen::MatrixXd to_dense(const SymLowerMatrix& K) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(K.order, K.order);
  const SparseColMatrix& S = K.storage;
  for (Index j = 0; j < S.ncols; ++j) {
    for (Index k = S.colptr[j]; k < S.colptr[j + 1]; ++k) {
      Index i = S.rowind[k];
      M(i, j) = S.values[k];
      M(j, i) = S.values[k];
    }
  }
  return M;
}

namespace {

void write_coordinate(std::ostream& os, const SparseColMatrix& A,
                      const char* kind) {
  os << "%%MatrixMarket matrix coordinate real " << kind << "\n";
  os << A.nrows << " " << A.ncols << " " << A.nnz() << "\n";
  std::ostringstream buf;
  buf.precision(17);
  for (Index j = 0; j < A.ncols; ++j)
    for (Index k = A.colptr[j]; k < A.colptr[j + 1]; ++k)
      buf << A.rowind[k] + 1 << " " << j + 1 << " " << A.values[k] << "\n";
  os << buf.str();
}

Triplets read_coordinate(std::istream& is, bool expect_symmetric) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("matrix market: empty stream");
  std::istringstream banner(line);
  std::string mm, obj, fmt, field, sym;
  banner >> mm >> obj >> fmt >> field >> sym;
  if (mm != "%%MatrixMarket" || obj != "matrix" || fmt != "coordinate" ||
      field != "real")
    throw DataError("matrix market: unsupported banner: " + line);
  if (expect_symmetric && sym != "symmetric")
    throw DataError("matrix market: expected symmetric matrix");
  if (!expect_symmetric && sym != "general")
    throw DataError("matrix market: expected general matrix");
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);
  Index m, n;
  long long nz;
  if (!(sizes >> m >> n >> nz)) throw DataError("matrix market: bad size line");
  Triplets t(m, n);
  for (long long k = 0; k < nz; ++k) {
    Index i, j;
    double v;
    if (!(is >> i >> j >> v)) throw DataError("matrix market: truncated data");
    t.add(i - 1, j - 1, v);
  }
  return t;
}

}  // namespace

void write_matrix_market(std::ostream& os, const SparseColMatrix& A) {
  write_coordinate(os, A, "general");
}

void write_matrix_market(std::ostream& os, const SymLowerMatrix& K) {
  write_coordinate(os, K.storage, "symmetric");
}

SparseColMatrix read_matrix_market(std::istream& is) {
  return from_triplets(read_coordinate(is, false));
}

SymLowerMatrix read_matrix_market_symmetric(std::istream& is) {
  Triplets t = read_coordinate(is, true);
  for (const auto& e : t.entries)
    if (e.row < e.col)
      throw DataError("matrix market: symmetric file stores upper entries");
  return SymLowerMatrix(from_triplets(t));
}

}  // namespace augip
