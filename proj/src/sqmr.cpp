#include "augip/sqmr.hpp"

#include <cmath>

namespace augip {

SqmrOutcome sqmr_solve(const SymLowerMatrix& K,
                       const MultilevelFactorization& M, const Vector& rhs,
                       const SqmrParams& p, const Vector* initial_guess) {
  const Index n = K.order;
  if (rhs.size() != n || M.order != n ||
      (initial_guess && initial_guess->size() != n))
    throw StructuralError("sqmr_solve: dimension mismatch");

  SqmrOutcome out;
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    out.solution = Vector::Zero(n);
    out.status = SqmrStatus::Converged;
    return out;
  }

  Vector x = initial_guess ? *initial_guess : Vector::Zero(n);
  Vector r = rhs - sym_spmv(K, x);
  Vector t = apply_preconditioner(M, r);
  Vector q = t;
  double rho = r.dot(t);
  double tau = r.norm();
  double theta = 0.0;
  Vector d = Vector::Zero(n);

  // best certified iterate so far
  Vector best_x = x;
  double best_relres = r.norm() / bnorm;

  auto certify = [&](const Vector& cand) {
    double rr = (rhs - sym_spmv(K, cand)).norm() / bnorm;
    if (rr < best_relres) {
      best_relres = rr;
      best_x = cand;
    }
    return rr;
  };

  if (best_relres <= p.eta) {
    out.solution = x;
    out.relres = best_relres;
    out.status = SqmrStatus::Converged;
    return out;
  }

  for (int it = 1; it <= p.max_iters; ++it) {
    Vector u = sym_spmv(K, q);
    double sigma = q.dot(u);
    if (std::abs(sigma) < 1e-14 * q.norm() * u.norm()) {
      // the Lanczos inner product vanished; before giving up, try the plain
      // preconditioned correction, which is exact for an exact preconditioner
      certify(x);
      certify(x + t);
      out.solution = best_x;
      out.relres = best_relres;
      out.iterations = it;
      out.status = best_relres <= p.eta ? SqmrStatus::Converged
                                        : SqmrStatus::Breakdown;
      return out;
    }
    double alpha = rho / sigma;
    r -= alpha * u;

    double theta_new = r.norm() / tau;
    double c = 1.0 / std::sqrt(1.0 + theta_new * theta_new);
    tau *= theta_new * c;
    d = (c * c * theta * theta) * d + (c * c * alpha) * q;
    x += d;
    theta = theta_new;

    // quasi-residual upper bound ||rhs - K x|| <= sqrt(it + 1) * tau
    bool gate = tau * std::sqrt(static_cast<double>(it + 1)) <= p.eta * bnorm;
    bool periodic = p.true_residual_period > 0 && it % p.true_residual_period == 0;
    if (gate || periodic) {
      double rr = certify(x);
      if (rr <= p.eta) {
        out.solution = x;
        out.relres = rr;
        out.iterations = it;
        out.status = SqmrStatus::Converged;
        return out;
      }
    }

    t = apply_preconditioner(M, r);
    double rho_new = r.dot(t);
    if (std::abs(rho_new) < 1e-14 * r.norm() * t.norm()) {
      certify(x);
      certify(x + t);
      out.solution = best_x;
      out.relres = best_relres;
      out.iterations = it;
      out.status = best_relres <= p.eta ? SqmrStatus::Converged
                                        : SqmrStatus::Breakdown;
      return out;
    }
    double beta = rho_new / rho;
    rho = rho_new;
    q = t + beta * q;
  }

  certify(x);
  out.solution = best_x;
  out.relres = best_relres;
  out.iterations = p.max_iters;
  out.status = best_relres <= p.eta ? SqmrStatus::Converged : SqmrStatus::MaxIters;
  return out;
}

}  // namespace augip
