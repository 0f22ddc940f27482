#pragma once

#include <vector>

#include "augip/kkt.hpp"
#include "augip/ldl.hpp"
#include "augip/mps.hpp"
#include "augip/sqmr.hpp"

namespace augip {

struct IpmParams {
  double tol_p = 1e-8;
  double tol_d = 1e-8;
  double tol_gap = 1e-8;
  double sigma = 0.1;               // centering factor
  double boundary_fraction = 0.99;  // fraction-to-boundary damping
  double eta_max = 0.1;
  double eta_min = 1e-6;
  double eta_shrink = 0.1;
  int max_iters = 200;
  double delta_p = 0.0;  // regularization on the (1,1) block
  double delta_d = 0.0;  // regularization added to X^{-1}Z
  FactorParams factor_params;
  int sqmr_max_iters = 2000;
  int sqmr_true_residual_period = 10;
};

struct IterationLog {
  int k = 0;
  double mu = 0.0;
  double rp = 0.0;   // ||r_p|| entering the step
  double rd = 0.0;   // ||r_d|| entering the step
  double gap = 0.0;  // x'z entering the step
  double eta = 0.0;  // final eta the accepted solve satisfied
  int sqmr_iters = 0;
  int resolves = 0;  // eta-tightening re-solves within the step
  double fill_ratio = 0.0;
  double t_factor = 0.0;
  double t_solve = 0.0;
  // audit fields (not part of the serialized report)
  double alpha_p = 0.0;
  double alpha_d = 0.0;
  double inexactness = 0.0;  // ||rhs - K d|| / ||rhs|| of the accepted solve
};

enum class SolveStatus { Optimal, MaxIters, NumericalFailure };

struct Solution {
  SolveStatus status = SolveStatus::MaxIters;
  Vector x, y, z;
  double objective = 0.0;
  std::vector<IterationLog> logs;
};

Iterate initial_point(const StandardFormLP& lp);

std::pair<double, double> step_lengths(const Iterate& it, const Directions& d,
                                       double boundary_fraction);

/// Opening eta of a step: clamp(eta_min, eta_max, x'z / (n (1 + ||r_p|| + ||r_d||))).
double choose_eta(const Residuals& res, const Iterate& it, const IpmParams& p);

bool check_convergence(const StandardFormLP& lp, const Iterate& it,
                       const IpmParams& p);

struct StepResult {
  bool ok = false;
  Iterate next;
  IterationLog log;
};

StepResult ipm_step(const StandardFormLP& lp, const Iterate& it,
                    const IpmParams& p, int k);

Solution ipm_solve(const StandardFormLP& lp, const IpmParams& p);

}  // namespace augip
