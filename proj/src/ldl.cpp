#include "augip/ldl.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

namespace augip {

std::vector<Index> fill_reducing_order(const SymLowerMatrix& K) {
  const Index n = K.order;
  std::vector<Index> p(n);
  bool has_offdiag = false;
  const SparseColMatrix& S = K.storage;
  for (Index j = 0; j < S.ncols && !has_offdiag; ++j)
    for (Index k = S.colptr[j]; k < S.colptr[j + 1]; ++k)
      if (S.rowind[k] != j) {
        has_offdiag = true;
        break;
      }
  if (!has_offdiag) {
    for (Index i = 0; i < n; ++i) p[i] = i;
    return p;
  }
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> pat(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(S.nnz() + n);
  for (Index i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
  for (Index j = 0; j < S.ncols; ++j)
    for (Index k = S.colptr[j]; k < S.colptr[j + 1]; ++k)
      if (S.rowind[k] != j) trip.emplace_back(S.rowind[k], j, 1.0);
  pat.setFromTriplets(trip.begin(), trip.end());
  Eigen::AMDOrdering<int> amd;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> P;
  amd(pat.selfadjointView<Eigen::Lower>(), P);
  // P.indices()[t] is the old index eliminated at position t
  for (Index t = 0; t < n; ++t) p[P.indices()[t]] = t;
  return p;
}

InverseNormEstimator::InverseNormEstimator(Index order)
    : acc_(static_cast<size_t>(order), 0.0),
      active_(static_cast<size_t>(order), 1) {}

bool InverseNormEstimator::attempt(
    const std::vector<Index>& pivots,
    const std::vector<std::vector<std::pair<Index, double>>>& cols,
    double kappa) {
  // acc_[i] bounds the 1-norm of row i of L^{-1} over the eliminated columns,
  // i.e. the worst case of the forward substitution L w = s over every sign
  // vector s. The pivot row finalizes at 1 + acc; each row touched by the
  // pivot column inherits |mult| times that, so the bound only grows.
  std::vector<double> w(pivots.size());
  double cand = max_w_;
  for (size_t k = 0; k < pivots.size(); ++k) {
    w[k] = 1.0 + acc_[pivots[k]];
    cand = std::max(cand, w[k]);
  }
  std::map<Index, double> delta;
  for (size_t k = 0; k < cols.size(); ++k)
    for (const auto& [row, mult] : cols[k])
      delta[row] += std::abs(mult) * w[k];
  for (const auto& [row, d] : delta) {
    if (!active_[row]) continue;
    bool is_pivot = false;
    for (Index pv : pivots) is_pivot = is_pivot || pv == row;
    if (is_pivot) continue;
    cand = std::max(cand, 1.0 + acc_[row] + d);
  }
  if (cand > kappa) return false;
  for (const auto& [row, d] : delta) acc_[row] += d;
  for (size_t k = 0; k < pivots.size(); ++k) {
    active_[pivots[k]] = 0;
    max_w_ = std::max(max_w_, w[k]);
  }
  return true;
}

double InverseNormEstimator::estimate() const {
  double e = std::max(max_w_, acc_.empty() ? 0.0 : 1.0);
  for (size_t i = 0; i < acc_.size(); ++i)
    if (active_[i]) e = std::max(e, 1.0 + acc_[i]);
  return e;
}

namespace {

struct ElimStep {
  Index pivot;  // pre-permutation level index
  std::vector<std::pair<Index, double>> mults;
};

void drop_small(std::vector<std::pair<Index, double>>& mults, double tau) {
  double colmax = 0.0;
  for (const auto& [i, v] : mults) colmax = std::max(colmax, std::abs(v));
  if (colmax == 0.0 || tau == 0.0) return;
  std::erase_if(mults, [&](const auto& e) {
    return std::abs(e.second) < tau * colmax;
  });
}

}  // namespace

std::pair<LevelFactor, SymLowerMatrix> factor_level(const SymLowerMatrix& Smat,
                                                    const FactorParams& p) {
  const Index N = Smat.order;
  // full symmetric dynamic storage
  std::vector<std::map<Index, double>> cols(N);
  double maxabs = 0.0;
  {
    const SparseColMatrix& S = Smat.storage;
    for (Index j = 0; j < S.ncols; ++j)
      for (Index k = S.colptr[j]; k < S.colptr[j + 1]; ++k) {
        Index i = S.rowind[k];
        double v = S.values[k];
        cols[j][i] = v;
        if (i != j) cols[i][j] = v;
        maxabs = std::max(maxabs, std::abs(v));
      }
  }
  const double tiny = 1e-14 * maxabs;

  std::vector<char> eliminated(N, 0), postponed(N, 0);
  InverseNormEstimator est(N);
  std::vector<ElimStep> steps;
  std::vector<PivotBlock> D;

  auto erase_index = [&](Index k) {
    for (const auto& [i, v] : cols[k])
      if (i != k) cols[i].erase(k);
    cols[k].clear();
  };

  for (Index k = 0; k < N; ++k) {
    if (eliminated[k] || postponed[k]) continue;
    double d = 0.0;
    {
      auto it = cols[k].find(k);
      if (it != cols[k].end()) d = it->second;
    }
    bool accepted = false;

    if (std::abs(d) > tiny) {
      std::vector<std::pair<Index, double>> mults;
      mults.reserve(cols[k].size());
      for (const auto& [i, v] : cols[k])
        if (i != k) mults.emplace_back(i, v / d);
      if (est.attempt({k}, {mults}, p.kappa)) {
        drop_small(mults, p.tau_L);
        for (const auto& [i, li] : mults)
          for (const auto& [j, lj] : mults) cols[j][i] -= li * d * lj;
        erase_index(k);
        eliminated[k] = 1;
        D.push_back({1, d, 0.0, 0.0});
        steps.push_back({k, std::move(mults)});
        accepted = true;
      }
    }

    if (!accepted) {
      // 2x2 attempt: partner is the largest off-diagonal in this column
      Index partner = -1;
      double pmag = 0.0;
      for (const auto& [i, v] : cols[k]) {
        if (i == k || postponed[i]) continue;
        double m = std::abs(v);
        if (m > pmag) {  // map order gives the smallest index on ties
          pmag = m;
          partner = i;
        }
      }
      if (partner >= 0 && pmag > 0.0) {
        Index j = partner;
        double bkj = cols[k][j];
        double cjj = 0.0;
        {
          auto it = cols[j].find(j);
          if (it != cols[j].end()) cjj = it->second;
        }
        double det = d * cjj - bkj * bkj;
        if (std::abs(det) > tiny * maxabs) {
          std::map<Index, std::pair<double, double>> rows;  // i -> (S_ik, S_ij)
          for (const auto& [i, v] : cols[k])
            if (i != k && i != j) rows[i].first = v;
          for (const auto& [i, v] : cols[j])
            if (i != k && i != j) rows[i].second = v;
          std::vector<std::pair<Index, double>> mk, mj;
          mk.reserve(rows.size());
          mj.reserve(rows.size());
          for (const auto& [i, sv] : rows) {
            double l1 = (sv.first * cjj - sv.second * bkj) / det;
            double l2 = (-sv.first * bkj + sv.second * d) / det;
            if (l1 != 0.0) mk.emplace_back(i, l1);
            if (l2 != 0.0) mj.emplace_back(i, l2);
          }
          if (est.attempt({k, j}, {mk, mj}, p.kappa)) {
            drop_small(mk, p.tau_L);
            drop_small(mj, p.tau_L);
            // rebuild per-row pairs from the kept entries
            std::map<Index, std::pair<double, double>> kept;
            for (const auto& [i, v] : mk) kept[i].first = v;
            for (const auto& [i, v] : mj) kept[i].second = v;
            for (const auto& [i2, u2] : kept) {
              double p2 = d * u2.first + bkj * u2.second;
              double q2 = bkj * u2.first + cjj * u2.second;
              for (const auto& [i1, u1] : kept)
                cols[i2][i1] -= u1.first * p2 + u1.second * q2;
            }
            erase_index(k);
            erase_index(j);
            eliminated[k] = 1;
            eliminated[j] = 1;
            D.push_back({2, d, bkj, cjj});
            steps.push_back({k, std::move(mk)});
            steps.push_back({j, std::move(mj)});
            accepted = true;
          }
        }
      }
    }

    if (!accepted) postponed[k] = 1;
  }

  LevelFactor lf;
  lf.order = N;
  lf.accepted_count = static_cast<Index>(steps.size());
  lf.D = std::move(D);
  lf.local_perm.reserve(N);
  for (const auto& s : steps) lf.local_perm.push_back(s.pivot);
  for (Index i = 0; i < N; ++i)
    if (postponed[i]) {
      lf.local_perm.push_back(i);
      lf.postponed.push_back(i);
    }
  std::vector<Index> newpos(N);
  for (Index t = 0; t < N; ++t) newpos[lf.local_perm[t]] = t;

  Triplets lt(N, N);
  for (size_t t = 0; t < steps.size(); ++t)
    for (const auto& [i, v] : steps[t].mults)
      lt.add(newpos[i], static_cast<Index>(t), v);
  lf.L = from_triplets(lt);

  // Schur complement over the postponed set, with its own dropping
  const Index ns = static_cast<Index>(lf.postponed.size());
  std::vector<Index> subpos(N, -1);
  for (Index t = 0; t < ns; ++t) subpos[lf.postponed[t]] = t;
  Triplets st(ns, ns);
  for (Index t = 0; t < ns; ++t) {
    Index pj = lf.postponed[t];
    double colmax = 0.0;
    for (const auto& [i, v] : cols[pj])
      if (subpos[i] >= 0) colmax = std::max(colmax, std::abs(v));
    for (const auto& [i, v] : cols[pj]) {
      if (subpos[i] < t) continue;  // lower triangle only
      if (p.tau_S > 0.0 && std::abs(v) < p.tau_S * colmax) continue;
      st.add(subpos[i], t, v);
    }
  }
  return {std::move(lf), SymLowerMatrix(from_triplets(st))};
}

DenseFactor factor_dense(const Eigen::MatrixXd& M, int level_tag) {
  const Index n = static_cast<Index>(M.rows());
  DenseFactor F;
  F.order = n;
  if (n == 0) return F;
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  // full pivoting tolerates extreme scaling; only an exactly vanishing
  // remainder means the block is singular
  const double singtol = 0.0;

  Eigen::MatrixXd W = M;
  std::vector<char> done(n, 0);
  struct Step {
    std::vector<Index> pivots;
    std::vector<std::vector<double>> mults;  // per pivot column, size n
  };
  std::vector<Step> steps;
  Index remaining = n;
  while (remaining > 0) {
    Index pd = -1, pq = -1, pr = -1;
    double dmax = -1.0, omax = -1.0;
    for (Index i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (std::abs(W(i, i)) > dmax) {
        dmax = std::abs(W(i, i));
        pd = i;
      }
      for (Index j = i + 1; j < n; ++j) {
        if (done[j]) continue;
        if (std::abs(W(j, i)) > omax) {
          omax = std::abs(W(j, i));
          pq = i;
          pr = j;
        }
      }
    }
    if (dmax >= alpha * omax && dmax > singtol) {
      Index q = pd;
      double d = W(q, q);
      Step s;
      s.pivots = {q};
      s.mults.emplace_back(n, 0.0);
      for (Index i = 0; i < n; ++i)
        if (!done[i] && i != q) s.mults[0][i] = W(i, q) / d;
      for (Index i = 0; i < n; ++i) {
        if (done[i] || i == q) continue;
        for (Index j = 0; j < n; ++j) {
          if (done[j] || j == q) continue;
          W(i, j) -= s.mults[0][i] * d * s.mults[0][j];
        }
      }
      F.D.push_back({1, d, 0.0, 0.0});
      done[q] = 1;
      remaining -= 1;
      steps.push_back(std::move(s));
    } else if (omax > singtol) {
      Index q = pq, r = pr;
      double a = W(q, q), b = W(r, q), c = W(r, r);
      double det = a * c - b * b;
      if (std::abs(det) <= singtol * singtol)
        throw FactorizationError(level_tag, q, "singular 2x2 pivot in dense block");
      Step s;
      s.pivots = {q, r};
      s.mults.emplace_back(n, 0.0);
      s.mults.emplace_back(n, 0.0);
      for (Index i = 0; i < n; ++i) {
        if (done[i] || i == q || i == r) continue;
        double aiq = W(i, q), air = W(i, r);
        s.mults[0][i] = (aiq * c - air * b) / det;
        s.mults[1][i] = (-aiq * b + air * a) / det;
      }
      for (Index i = 0; i < n; ++i) {
        if (done[i] || i == q || i == r) continue;
        double pi = a * s.mults[0][i] + b * s.mults[1][i];
        double qi = b * s.mults[0][i] + c * s.mults[1][i];
        for (Index j = 0; j < n; ++j) {
          if (done[j] || j == q || j == r) continue;
          W(j, i) -= s.mults[0][j] * pi + s.mults[1][j] * qi;
        }
      }
      F.D.push_back({2, a, b, c});
      done[q] = 1;
      done[r] = 1;
      remaining -= 2;
      steps.push_back(std::move(s));
    } else {
      Index bad = 0;
      for (Index i = 0; i < n; ++i)
        if (!done[i]) {
          bad = i;
          break;
        }
      throw FactorizationError(level_tag, bad, "singular final dense block");
    }
  }

  F.perm.reserve(n);
  for (const auto& s : steps)
    for (Index pv : s.pivots) F.perm.push_back(pv);
  std::vector<Index> pos(n);
  for (Index t = 0; t < n; ++t) pos[F.perm[t]] = t;
  F.L = Eigen::MatrixXd::Identity(n, n);
  Index t = 0;
  for (const auto& s : steps)
    for (size_t k = 0; k < s.pivots.size(); ++k, ++t)
      for (Index i = 0; i < n; ++i)
        if (s.mults[k][i] != 0.0) F.L(pos[i], t) = s.mults[k][i];
  return F;
}

Vector dense_factor_solve(const DenseFactor& F, const Vector& r) {
  const Index n = F.order;
  if (n == 0) return r;
  Vector w(n);
  for (Index t = 0; t < n; ++t) w[t] = r[F.perm[t]];
  F.L.triangularView<Eigen::UnitLower>().solveInPlace(w);
  Index t = 0;
  for (const auto& blk : F.D) {
    if (blk.size == 1) {
      w[t] /= blk.a;
      t += 1;
    } else {
      double det = blk.a * blk.c - blk.b * blk.b;
      double r1 = w[t], r2 = w[t + 1];
      w[t] = (blk.c * r1 - blk.b * r2) / det;
      w[t + 1] = (-blk.b * r1 + blk.a * r2) / det;
      t += 2;
    }
  }
  F.L.transpose().triangularView<Eigen::UnitUpper>().solveInPlace(w);
  Vector out(n);
  for (Index s = 0; s < n; ++s) out[F.perm[s]] = w[s];
  return out;
}

namespace {

SymLowerMatrix pivot_blocks_as_matrix(const std::vector<PivotBlock>& D,
                                      Index order) {
  Triplets t(order, order);
  Index pos = 0;
  for (const auto& blk : D) {
    if (blk.size == 1) {
      t.add(pos, pos, blk.a);
      pos += 1;
    } else {
      t.add(pos, pos, blk.a);
      t.add(pos + 1, pos, blk.b);
      t.add(pos + 1, pos + 1, blk.c);
      pos += 2;
    }
  }
  return SymLowerMatrix(from_triplets(t));
}

void dump_level(const std::string& dir, size_t lev, const LevelFactor& lf,
                const SymLowerMatrix& schur) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto base = fs::path(dir) / ("level" + std::to_string(lev));
  {
    std::ofstream os(base.string() + "_L.mtx");
    write_matrix_market(os, lf.L);
  }
  {
    std::ofstream os(base.string() + "_D.mtx");
    write_matrix_market(os, pivot_blocks_as_matrix(lf.D, lf.accepted_count));
  }
  {
    std::ofstream os(base.string() + "_schur.mtx");
    write_matrix_market(os, schur);
  }
}

}  // namespace

MultilevelFactorization factor_multilevel(const SymLowerMatrix& K,
                                          const FactorParams& p) {
  MultilevelFactorization F;
  F.order = K.order;
  F.global_perm = fill_reducing_order(K);
  SymLowerMatrix cur = sym_permute(K, F.global_perm);
  while (cur.order > p.final_dense_threshold &&
         static_cast<int>(F.levels.size()) < p.max_levels) {
    auto [lf, next] = factor_level(cur, p);
    if (lf.accepted_count == 0) break;  // no progress; finish densely
    if (!p.debug_dump_dir.empty())
      dump_level(p.debug_dump_dir, F.levels.size(), lf, next);
    F.levels.push_back(std::move(lf));
    cur = std::move(next);
    if (cur.order == 0) break;
  }
  if (cur.order > 0 || F.levels.empty())
    F.final_dense = factor_dense(to_dense(cur), -1);

  long long nnz = 0;
  for (const auto& lf : F.levels) {
    nnz += lf.L.nnz();
    for (const auto& blk : lf.D) nnz += blk.size == 1 ? 1 : 3;
  }
  for (Index j = 0; j < F.final_dense.order; ++j)
    for (Index i = j + 1; i < F.final_dense.order; ++i)
      if (F.final_dense.L(i, j) != 0.0) ++nnz;
  for (const auto& blk : F.final_dense.D) nnz += blk.size == 1 ? 1 : 3;
  F.nnz_total = nnz;
  return F;
}

namespace {

Vector solve_from_level(const MultilevelFactorization& F, size_t lev,
                        const Vector& r) {
  if (lev == F.levels.size()) return dense_factor_solve(F.final_dense, r);
  const LevelFactor& lf = F.levels[lev];
  const Index N = lf.order;
  const Index acc = lf.accepted_count;
  Vector w(N);
  for (Index t = 0; t < N; ++t) w[t] = r[lf.local_perm[t]];
  const SparseColMatrix& L = lf.L;
  for (Index t = 0; t < acc; ++t) {
    double xt = w[t];
    if (xt == 0.0) continue;
    for (Index k = L.colptr[t]; k < L.colptr[t + 1]; ++k)
      w[L.rowind[k]] -= L.values[k] * xt;
  }
  if (N > acc) {
    Vector tail = solve_from_level(F, lev + 1, w.tail(N - acc));
    w.tail(N - acc) = tail;
  }
  Index t = 0;
  for (const auto& blk : lf.D) {
    if (blk.size == 1) {
      w[t] /= blk.a;
      t += 1;
    } else {
      double det = blk.a * blk.c - blk.b * blk.b;
      double r1 = w[t], r2 = w[t + 1];
      w[t] = (blk.c * r1 - blk.b * r2) / det;
      w[t + 1] = (-blk.b * r1 + blk.a * r2) / det;
      t += 2;
    }
  }
  for (Index s = acc - 1; s >= 0; --s) {
    double v = w[s];
    for (Index k = L.colptr[s]; k < L.colptr[s + 1]; ++k)
      v -= L.values[k] * w[L.rowind[k]];
    w[s] = v;
  }
  Vector out(N);
  for (Index s2 = 0; s2 < N; ++s2) out[lf.local_perm[s2]] = w[s2];
  return out;
}

}  // namespace

Vector apply_preconditioner(const MultilevelFactorization& F, const Vector& r) {
  if (r.size() != F.order)
    throw StructuralError("apply_preconditioner: dimension mismatch");
  if (F.order == 0) return r;
  Vector t(F.order);
  for (Index i = 0; i < F.order; ++i) t[F.global_perm[i]] = r[i];
  Vector s = solve_from_level(F, 0, t);
  Vector out(F.order);
  for (Index i = 0; i < F.order; ++i) out[i] = s[F.global_perm[i]];
  return out;
}

double fill_ratio(const MultilevelFactorization& F, const SparseColMatrix& A) {
  if (A.nnz() == 0) throw DataError("fill_ratio: matrix has no entries");
  return static_cast<double>(F.nnz_total) / static_cast<double>(A.nnz());
}

}  // namespace augip
