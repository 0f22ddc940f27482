#pragma once

#include "augip/ldl.hpp"
#include "augip/sparse.hpp"

namespace augip {

struct SqmrParams {
  double eta = 0.1;             // relative residual target, in (0, 1)
  int max_iters = 1000;
  int true_residual_period = 10;  // recompute the true residual this often
};

enum class SqmrStatus { Converged, MaxIters, Breakdown };

struct SqmrOutcome {
  Vector solution;
  int iterations = 0;
  double relres = 0.0;  // final true relative residual
  SqmrStatus status = SqmrStatus::MaxIters;
};

/// Simplified QMR for symmetric indefinite K with a symmetric indefinite
/// preconditioner. Convergence is certified on the true residual; the QMR
/// quasi-residual bound only gates when to recompute it.
SqmrOutcome sqmr_solve(const SymLowerMatrix& K,
                       const MultilevelFactorization& M, const Vector& rhs,
                       const SqmrParams& p, const Vector* initial_guess = nullptr);

}  // namespace augip
