#pragma once

#include <utility>
#include <vector>

#include "augip/sparse.hpp"

namespace augip {

struct FactorizationError : std::runtime_error {
  int level;    // -1 for the final dense block
  Index index;  // offending index within that block
  FactorizationError(int level_, Index index_, const std::string& what)
      : std::runtime_error(what), level(level_), index(index_) {}
};

struct FactorParams {
  double kappa = 5.0;   // bound on the ||L^{-1}|| estimate, > 1
  double tau_L = 1e-3;  // drop tolerance for L entries
  double tau_S = 1e-3;  // drop tolerance for Schur-complement entries
  int max_levels = 20;
  int final_dense_threshold = 200;
  std::string debug_dump_dir;  // write per-level L, D, Schur as Matrix Market
};

/// 1x1 pivot {a} or symmetric 2x2 pivot [[a, b], [b, c]].
struct PivotBlock {
  int size = 1;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// One level of the factorization, in level-local permuted indices:
/// positions 0..accepted_count-1 hold accepted pivots in elimination order,
/// the rest hold the postponed indices. L stores subdiagonal multipliers
/// only (unit diagonal implicit); columns past accepted_count are empty.
struct LevelFactor {
  Index order = 0;
  Index accepted_count = 0;
  SparseColMatrix L;
  std::vector<PivotBlock> D;
  std::vector<Index> local_perm;  // local_perm[position] = pre-permutation index
  std::vector<Index> postponed;   // pre-permutation indices, increasing
};

/// Dense factorization of the last Schur complement with full symmetric
/// pivoting; perm[position] = block-local index eliminated at that position.
struct DenseFactor {
  Index order = 0;
  std::vector<Index> perm;
  Eigen::MatrixXd L;  // unit lower triangular, in pivot order
  std::vector<PivotBlock> D;
};

struct MultilevelFactorization {
  Index order = 0;
  std::vector<Index> global_perm;  // fill-reducing; global_perm[old] = new
  std::vector<LevelFactor> levels;
  DenseFactor final_dense;
  long long nnz_total = 0;  // stored L and D entries across all levels
};

/// Approximate minimum degree ordering of the symmetric pattern;
/// returns p with p[old] = new.
std::vector<Index> fill_reducing_order(const SymLowerMatrix& K);

/// Running estimate of ||L^{-1}||_inf over a growing unit lower triangular
/// factor. For every row it tracks the worst case of the forward substitution
/// L w = s over all sign vectors s (the 1-norm of that row of L^{-1}, bounded
/// from above), so a pivot whose multipliers would break the bound is
/// rejected before it is committed.
class InverseNormEstimator {
 public:
  explicit InverseNormEstimator(Index order);

  /// Attempt a pivot of one or two columns; cols[k] lists (row, multiplier)
  /// pairs for pivot row pivots[k]. Commits and returns true iff the updated
  /// estimate stays within kappa.
  bool attempt(const std::vector<Index>& pivots,
               const std::vector<std::vector<std::pair<Index, double>>>& cols,
               double kappa);

  double estimate() const;

 private:
  std::vector<double> acc_;
  std::vector<char> active_;
  double max_w_ = 0.0;
};

std::pair<LevelFactor, SymLowerMatrix> factor_level(const SymLowerMatrix& S,
                                                    const FactorParams& p);

MultilevelFactorization factor_multilevel(const SymLowerMatrix& K,
                                          const FactorParams& p);

Vector apply_preconditioner(const MultilevelFactorization& F, const Vector& r);

double fill_ratio(const MultilevelFactorization& F, const SparseColMatrix& A);

/// Dense full-pivot LDL' used for the last Schur complement.
DenseFactor factor_dense(const Eigen::MatrixXd& M, int level_tag);
Vector dense_factor_solve(const DenseFactor& F, const Vector& r);

}  // namespace augip
