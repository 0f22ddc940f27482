#include "augip/kkt.hpp"

#include <cmath>
#include <limits>

namespace augip {

Residuals compute_residuals(const StandardFormLP& lp, const Iterate& it) {
  const Index m = lp.A.nrows, n = lp.A.ncols;
  if (it.x.size() != n || it.y.size() != m || it.z.size() != n)
    throw StructuralError("compute_residuals: dimension mismatch");
  Residuals res;
  res.r_p = spmv(lp.A, it.x) - lp.b;
  res.r_d = spmv_transpose(lp.A, it.y) + it.z - lp.c;
  res.r_c = it.x.cwiseProduct(it.z).array() - it.mu;
  res.norm_p = res.r_p.norm();
  res.norm_d = res.r_d.norm();
  res.norm_c = res.r_c.norm();
  return res;
}

double duality_mu(const Iterate& it, double sigma) {
  if (it.x.size() == 0) return 0.0;
  return sigma * it.x.dot(it.z) / static_cast<double>(it.x.size());
}

KktSystem assemble_kkt(const SparseColMatrix& A, const Iterate& it,
                       double delta_p, double delta_d) {
  const Index m = A.nrows, n = A.ncols;
  if (it.x.size() != n || it.z.size() != n)
    throw StructuralError("assemble_kkt: dimension mismatch");
  if (n > 0 && (it.x.minCoeff() <= 0.0 || it.z.minCoeff() <= 0.0))
    throw StateError("assemble_kkt: iterate not strictly interior");
  Triplets t(m + n, m + n);
  if (delta_p > 0.0)
    for (Index j = 0; j < m; ++j) t.add(j, j, -delta_p);
  for (Index i = 0; i < n; ++i) {
    t.add(m + i, m + i, it.z[i] / it.x[i] + delta_d);
    for (Index k = A.colptr[i]; k < A.colptr[i + 1]; ++k)
      t.add(m + i, A.rowind[k], A.values[k]);
  }
  KktSystem sys;
  sys.K = SymLowerMatrix(from_triplets(t));
  sys.delta_p = delta_p;
  sys.delta_d = delta_d;
  sys.m = m;
  sys.n = n;
  return sys;
}

Vector assemble_rhs(const Residuals& res, const Iterate& it) {
  const Index m = static_cast<Index>(res.r_p.size());
  const Index n = static_cast<Index>(res.r_d.size());
  if (it.x.size() != n || res.r_c.size() != n)
    throw StructuralError("assemble_rhs: dimension mismatch");
  Vector rhs(m + n);
  rhs.head(m) = res.r_p;
  rhs.tail(n) = -res.r_d + res.r_c.cwiseQuotient(it.x);
  return rhs;
}

Directions recover_directions(const Vector& d_y, const Vector& d_xblock,
                              const Iterate& it, const Residuals& res) {
  const Index n = static_cast<Index>(it.x.size());
  if (d_xblock.size() != n || res.r_c.size() != n ||
      d_y.size() != res.r_p.size())
    throw StructuralError("recover_directions: dimension mismatch");
  Directions d;
  d.d_y = d_y;
  d.d_x = -d_xblock;
  d.d_z = -(res.r_c + it.z.cwiseProduct(d.d_x)).cwiseQuotient(it.x);
  return d;
}

double inexactness_ratio(const KktSystem& sys, const Vector& rhs,
                         const Vector& d) {
  if (rhs.size() != sys.K.order || d.size() != sys.K.order)
    throw StructuralError("inexactness_ratio: dimension mismatch");
  double rn = rhs.norm();
  if (rn == 0.0) {
    if (d.norm() == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return (rhs - sym_spmv(sys.K, d)).norm() / rn;
}

}  // namespace augip
