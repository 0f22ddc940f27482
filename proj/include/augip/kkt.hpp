#pragma once

#include "augip/mps.hpp"
#include "augip/sparse.hpp"

namespace augip {

/// Strictly interior primal-dual point plus the centering target mu.
struct Iterate {
  Vector x;
  Vector y;
  Vector z;
  double mu = 0.0;
};

struct Residuals {
  Vector r_p;  // A x - b
  Vector r_d;  // A' y + z - c
  Vector r_c;  // x .* z - mu e
  double norm_p = 0.0;
  double norm_d = 0.0;
  double norm_c = 0.0;
};

/// Augmented system K = [[-delta_p I, A], [A', X^{-1}Z + delta_d I]] of order
/// m + n, stored as a lower triangle. Indices 0..m-1 carry d_y, indices
/// m..m+n-1 carry the x-block unknown (which is -d_x).
struct KktSystem {
  SymLowerMatrix K;
  double delta_p = 0.0;
  double delta_d = 0.0;
  Index m = 0;
  Index n = 0;
};

struct Directions {
  Vector d_y;
  Vector d_x;
  Vector d_z;
};

Residuals compute_residuals(const StandardFormLP& lp, const Iterate& it);

/// sigma * (x'z) / n.
double duality_mu(const Iterate& it, double sigma);

KktSystem assemble_kkt(const SparseColMatrix& A, const Iterate& it,
                       double delta_p, double delta_d);

/// Reduced right-hand side paired with the unknown (d_y, -d_x):
/// first block r_p, second block -r_d + X^{-1} r_c.
Vector assemble_rhs(const Residuals& res, const Iterate& it);

/// Recover (d_y, d_x, d_z) from the solved augmented unknown; d_xblock is
/// the x-block of the solution, i.e. -d_x.
Directions recover_directions(const Vector& d_y, const Vector& d_xblock,
                              const Iterate& it, const Residuals& res);

/// ||rhs - K d||_2 / ||rhs||_2; 0 when both are zero, +inf when only rhs is.
double inexactness_ratio(const KktSystem& sys, const Vector& rhs,
                         const Vector& d);

}  // namespace augip
