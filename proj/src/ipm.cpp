#include "augip/ipm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace augip {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

Iterate initial_point(const StandardFormLP& lp) {
  const Index m = lp.A.nrows, n = lp.A.ncols;
  double beta = 1.0;
  if (m > 0) beta = std::max(beta, lp.b.cwiseAbs().maxCoeff());
  if (n > 0) beta = std::max(beta, lp.c.cwiseAbs().maxCoeff());
  Iterate it;
  it.x = Vector::Constant(n, beta);
  it.y = Vector::Zero(m);
  it.z = Vector::Constant(n, beta);
  it.mu = n > 0 ? it.x.dot(it.z) / static_cast<double>(n) : 0.0;
  return it;
}

std::pair<double, double> step_lengths(const Iterate& it, const Directions& d,
                                       double boundary_fraction) {
  double ap = 1.0, ad = 1.0;
  for (Index i = 0; i < it.x.size(); ++i) {
    if (d.d_x[i] < 0.0) ap = std::min(ap, boundary_fraction * (-it.x[i] / d.d_x[i]));
    if (d.d_z[i] < 0.0) ad = std::min(ad, boundary_fraction * (-it.z[i] / d.d_z[i]));
  }
  return {ap, ad};
}

double choose_eta(const Residuals& res, const Iterate& it, const IpmParams& p) {
  const Index n = static_cast<Index>(it.x.size());
  if (n == 0) return p.eta_min;
  double base = it.x.dot(it.z) / static_cast<double>(n) /
                (1.0 + res.norm_p + res.norm_d);
  return std::clamp(base, p.eta_min, p.eta_max);
}

bool check_convergence(const StandardFormLP& lp, const Iterate& it,
                       const IpmParams& p) {
  Residuals res;
  {
    Iterate affine = it;
    affine.mu = 0.0;
    res = compute_residuals(lp, affine);
  }
  double gap = it.x.dot(it.z);
  double obj = lp.c.dot(it.x);
  return res.norm_p / (1.0 + lp.b.norm()) <= p.tol_p &&
         res.norm_d / (1.0 + lp.c.norm()) <= p.tol_d &&
         gap / (1.0 + std::abs(obj)) <= p.tol_gap;
}

StepResult ipm_step(const StandardFormLP& lp, const Iterate& it_in,
                    const IpmParams& p, int k) {
  const Index m = lp.A.nrows, n = lp.A.ncols;
  StepResult out;
  IterationLog& log = out.log;
  log.k = k;

  Iterate it = it_in;
  it.mu = duality_mu(it, p.sigma);
  Residuals res = compute_residuals(lp, it);
  log.mu = it.mu;
  log.rp = res.norm_p;
  log.rd = res.norm_d;
  log.gap = it.x.dot(it.z);

  KktSystem sys = assemble_kkt(lp.A, it, p.delta_p, p.delta_d);
  Vector rhs = assemble_rhs(res, it);

  FactorParams fp = p.factor_params;
  auto t0 = std::chrono::steady_clock::now();
  MultilevelFactorization fac;
  // dropping can leave the final dense block singular even though K is not;
  // retreat toward the exact factorization before giving up
  bool factored = false;
  for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
    try {
      fac = factor_multilevel(sys.K, fp);
      factored = true;
    } catch (const FactorizationError&) {
      if (attempt == 2) {
        fp.tau_L = 0.0;
        fp.tau_S = 0.0;
      } else {
        fp.tau_L *= 0.1;
        fp.tau_S *= 0.1;
      }
    }
  }
  if (!factored) return out;  // not ok
  log.t_factor = seconds_since(t0);

  const double scale_p = 1.0 + lp.b.norm();
  const double scale_d = 1.0 + lp.c.norm();

  double eta = choose_eta(res, it, p);
  int shrink_count = 0;
  bool refactored = false;
  Vector guess;
  bool have_guess = false;

  while (true) {
    SqmrParams sp;
    sp.eta = eta;
    sp.max_iters = p.sqmr_max_iters;
    sp.true_residual_period = p.sqmr_true_residual_period;
    auto ts = std::chrono::steady_clock::now();
    SqmrOutcome oc =
        sqmr_solve(sys.K, fac, rhs, sp, have_guess ? &guess : nullptr);
    log.t_solve += seconds_since(ts);
    log.sqmr_iters += oc.iterations;

    bool solve_failed = oc.status != SqmrStatus::Converged;
    bool bad_p = false, bad_d = false;
    Directions dirs;
    double ap = 0.0, ad = 0.0;
    Iterate next;
    if (!solve_failed) {
      dirs = recover_directions(oc.solution.head(m), oc.solution.tail(n), it, res);
      std::tie(ap, ad) = step_lengths(it, dirs, p.boundary_fraction);
      next.x = it.x + ap * dirs.d_x;
      next.y = it.y + ad * dirs.d_y;
      next.z = it.z + ad * dirs.d_z;
      next.mu = n > 0 ? next.x.dot(next.z) / static_cast<double>(n) : 0.0;
      double rp_new = (spmv(lp.A, next.x) - lp.b).norm();
      double rd_new = (spmv_transpose(lp.A, next.y) + next.z - lp.c).norm();
      bad_p = rp_new > (1.0 - 0.1 * ap) * res.norm_p && res.norm_p > p.tol_p * scale_p;
      bad_d = rd_new > (1.0 - 0.1 * ad) * res.norm_d && res.norm_d > p.tol_d * scale_d;
    }

    if (!solve_failed && !bad_p && !bad_d) {
      log.eta = eta;
      log.fill_ratio = fill_ratio(fac, lp.A);
      log.alpha_p = ap;
      log.alpha_d = ad;
      log.inexactness = inexactness_ratio(sys, rhs, oc.solution);
      out.next = std::move(next);
      out.ok = true;
      return out;
    }

    if (!solve_failed) {
      // insufficient residual decrease: tighten eta and continue the solve
      ++log.resolves;
      ++shrink_count;
      guess = oc.solution;
      have_guess = true;
      if (shrink_count <= 3) {
        eta *= p.eta_shrink;
        continue;
      }
    }
    // breakdown, stagnation, or three failed shrinks: tighter factorization
    if (!refactored) {
      refactored = true;
      fp.tau_L *= 0.1;
      fp.tau_S *= 0.1;
      auto tf = std::chrono::steady_clock::now();
      try {
        fac = factor_multilevel(sys.K, fp);
      } catch (const FactorizationError&) {
        fp.tau_L = 0.0;
        fp.tau_S = 0.0;
        try {
          fac = factor_multilevel(sys.K, fp);
        } catch (const FactorizationError&) {
          return out;
        }
      }
      log.t_factor += seconds_since(tf);
      shrink_count = 0;
      continue;
    }
    return out;  // not ok: numerical failure
  }
}

Solution ipm_solve(const StandardFormLP& lp, const IpmParams& p) {
  Solution sol;
  const Index n = lp.A.ncols;
  if (n == 0) {
    sol.status = SolveStatus::Optimal;
    sol.x = Vector();
    sol.y = Vector::Zero(lp.A.nrows);
    sol.z = Vector();
    sol.objective = 0.0;
    return sol;
  }
  Iterate it = initial_point(lp);
  sol.status = SolveStatus::MaxIters;
  IpmParams pp = p;
  for (int k = 0; k < p.max_iters; ++k) {
    if (check_convergence(lp, it, pp)) {
      sol.status = SolveStatus::Optimal;
      break;
    }
    StepResult step = ipm_step(lp, it, pp, k);
    pp.factor_params.debug_dump_dir.clear();  // dump the first step only
    if (!step.ok) {
      sol.status = SolveStatus::NumericalFailure;
      break;
    }
    sol.logs.push_back(step.log);
    it = std::move(step.next);
  }
  if (sol.status == SolveStatus::MaxIters && check_convergence(lp, it, p))
    sol.status = SolveStatus::Optimal;
  sol.x = it.x;
  sol.y = it.y;
  sol.z = it.z;
  sol.objective = lp.c.dot(it.x);
  return sol;
}

}  // namespace augip
