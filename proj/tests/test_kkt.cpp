#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "augip/kkt.hpp"
#include "support/oracles.hpp"

using namespace augip;

namespace {

StandardFormLP toy_lp() {
  Triplets t(1, 2);
  t.add(0, 0, 1.0);
  t.add(0, 1, 1.0);
  StandardFormLP lp;
  lp.A = from_triplets(t);
  lp.b = Vector::Constant(1, 1.0);
  lp.c = Vector(2);
  lp.c << 2, 1;
  return lp;
}

// solve the unreduced 3-block Newton system densely:
//   A d_x = -r_p,  A' d_y + d_z = -r_d,  Z d_x + X d_z = -r_c
Directions dense_newton(const StandardFormLP& lp, const Iterate& it,
                        const Residuals& res) {
  Index m = lp.A.nrows, n = lp.A.ncols;
  Eigen::MatrixXd Ad = to_dense(lp.A);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m + 2 * n, m + 2 * n);
  J.block(0, m, m, n) = Ad;
  J.block(m, 0, n, m) = Ad.transpose();
  J.block(m, m + n, n, n).setIdentity();
  J.block(m + n, m, n, n) = it.z.asDiagonal();
  J.block(m + n, m + n, n, n) = it.x.asDiagonal();
  Vector rhs(m + 2 * n);
  rhs << -res.r_p, -res.r_d, -res.r_c;
  Vector sol = J.fullPivLu().solve(rhs);
  Directions d;
  d.d_y = sol.head(m);
  d.d_x = sol.segment(m, n);
  d.d_z = sol.tail(n);
  return d;
}

}  // namespace

TEST_CASE("compute_residuals near the toy optimum") {
  StandardFormLP lp = toy_lp();
  Iterate it;
  it.x = Vector(2);
  it.x << 1e-8, 1 - 1e-8;
  it.y = Vector::Constant(1, 1.0);
  it.z = Vector(2);
  it.z << 1, 1e-8;
  it.mu = 0.0;
  Residuals res = compute_residuals(lp, it);
  CHECK(res.norm_p <= 2e-8);
  CHECK(res.norm_d <= 2e-8);
}

TEST_CASE("r_p vanishes on primal-feasible iterates") {
  StandardFormLP lp = toy_lp();
  Iterate it;
  it.x = Vector(2);
  it.x << 0.25, 0.75;
  it.y = Vector::Constant(1, 0.3);
  it.z = Vector::Constant(2, 0.5);
  it.mu = 0.1;
  Residuals res = compute_residuals(lp, it);
  CHECK(res.norm_p == 0.0);
}

TEST_CASE("r_c componentwise") {
  StandardFormLP lp = toy_lp();
  Iterate it;
  it.x = Vector::Constant(2, 1.0);
  it.y = Vector::Zero(1);
  it.z = Vector(2);
  it.z << 2, 3;
  it.mu = 2.0;
  Residuals res = compute_residuals(lp, it);
  CHECK(res.r_c[0] == 0.0);
  CHECK(res.r_c[1] == 1.0);
}

TEST_CASE("duality_mu") {
  Iterate it;
  it.x = Vector::Constant(2, 1.0);
  it.z = Vector::Constant(2, 1.0);
  CHECK(duality_mu(it, 1.0) == 1.0);
  CHECK(duality_mu(it, 0.0) == 0.0);
  it.x = Vector(2);
  it.x << 2, 4;
  CHECK(duality_mu(it, 0.5) == 1.5);
}

TEST_CASE("assemble_kkt small example") {
  StandardFormLP lp = toy_lp();
  Iterate it;
  it.x = Vector::Constant(2, 1.0);
  it.y = Vector::Zero(1);
  it.z = Vector(2);
  it.z << 2, 3;

  KktSystem sys = assemble_kkt(lp.A, it, 0.0, 0.0);
  Eigen::MatrixXd Kd = to_dense(sys.K);
  Eigen::MatrixXd want(3, 3);
  want << 0, 1, 1, 1, 2, 0, 1, 0, 3;
  CHECK((Kd - want).norm() == 0.0);

  KktSystem reg = assemble_kkt(lp.A, it, 1e-8, 1e-8);
  Eigen::MatrixXd Rd = to_dense(reg.K);
  CHECK(Rd(0, 0) == -1e-8);
  CHECK(Rd(1, 1) == 2 + 1e-8);
  CHECK(Rd(2, 2) == 3 + 1e-8);

  it.x[0] = 0.0;
  CHECK_THROWS_AS(assemble_kkt(lp.A, it, 0.0, 0.0), StateError);
}

TEST_CASE("assemble_kkt matches dense block construction") {
  std::mt19937 rng(31);
  SparseColMatrix A = test::random_sparse(3, 5, 0.6, rng);
  Iterate it;
  it.x = Vector::Random(5).cwiseAbs() + Vector::Constant(5, 0.1);
  it.y = Vector::Random(3);
  it.z = Vector::Random(5).cwiseAbs() + Vector::Constant(5, 0.1);

  KktSystem sys = assemble_kkt(A, it, 0.0, 0.0);
  Eigen::MatrixXd Kd = to_dense(sys.K);
  CHECK((Kd - Kd.transpose()).norm() == 0.0);

  Eigen::MatrixXd Ad = to_dense(A);
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(8, 8);
  want.block(0, 3, 3, 5) = Ad;
  want.block(3, 0, 5, 3) = Ad.transpose();
  want.block(3, 3, 5, 5) =
      (it.z.array() / it.x.array()).matrix().asDiagonal();
  CHECK((Kd - want).norm() == 0.0);
}

TEST_CASE("assemble_rhs componentwise") {
  Iterate it;
  it.x = Vector(2);
  it.x << 2, 1;
  it.z = Vector::Constant(2, 1.0);
  it.y = Vector::Zero(1);
  Residuals res;
  res.r_p = Vector::Constant(1, 1.0);
  res.r_d = Vector::Zero(2);
  res.r_c = Vector(2);
  res.r_c << 2, 0;
  Vector rhs = assemble_rhs(res, it);
  // pairing with the unknown (d_y, -d_x) puts +r_p in the first block
  CHECK(rhs[0] == 1.0);
  CHECK(rhs[1] == 1.0);
  CHECK(rhs[2] == 0.0);

  res.r_p.setZero();
  res.r_c.setZero();
  CHECK(assemble_rhs(res, it).norm() == 0.0);
}

TEST_CASE("reduced system reproduces the 3-block Newton solve") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    test::PlantedLp gen = test::planted_lp(3, 6, rng);
    Iterate it = test::random_interior(gen.lp, rng);
    Residuals res = compute_residuals(gen.lp, it);
    Directions want = dense_newton(gen.lp, it, res);

    KktSystem sys = assemble_kkt(gen.lp.A, it, 0.0, 0.0);
    Vector rhs = assemble_rhs(res, it);
    // the reduced rhs must equal K applied to (d_y, -d_x)
    Vector u(3 + 6);
    u << want.d_y, -want.d_x;
    CHECK((rhs - sym_spmv(sys.K, u)).norm() <= 1e-12 * (1 + rhs.norm()));

    Vector sol = test::dense_sym_solve(to_dense(sys.K), rhs);
    Directions got =
        recover_directions(sol.head(3), sol.tail(6), it, res);
    double scale = 1 + want.d_x.norm() + want.d_y.norm() + want.d_z.norm();
    CHECK((got.d_y - want.d_y).norm() <= 1e-10 * scale);
    CHECK((got.d_x - want.d_x).norm() <= 1e-10 * scale);
    CHECK((got.d_z - want.d_z).norm() <= 1e-10 * scale);

    // eliminated complementarity row holds regardless of solve accuracy
    Vector noisy = sol + 0.05 * Vector::Random(9);
    Directions gn = recover_directions(noisy.head(3), noisy.tail(6), it, res);
    Vector comp = it.z.cwiseProduct(gn.d_x) + it.x.cwiseProduct(gn.d_z) + res.r_c;
    CHECK(comp.norm() <= 1e-13 * (1 + res.r_c.norm() + gn.d_x.norm()));
  }
}

TEST_CASE("recover_directions scalar example") {
  Iterate it;
  it.x = Vector::Constant(1, 1.0);
  it.z = Vector::Constant(1, 2.0);
  it.y = Vector::Zero(0);
  Residuals res;
  res.r_p = Vector::Zero(0);
  res.r_d = Vector::Zero(1);
  res.r_c = Vector::Constant(1, 4.0);
  Directions d = recover_directions(Vector::Zero(0), Vector::Constant(1, 1.0),
                                    it, res);
  CHECK(d.d_x[0] == -1.0);
  CHECK(d.d_z[0] == -2.0);

  res.r_c.setZero();
  Directions z = recover_directions(Vector::Zero(0), Vector::Zero(1), it, res);
  CHECK(z.d_x.norm() == 0.0);
  CHECK(z.d_z.norm() == 0.0);
}

TEST_CASE("inexactness_ratio") {
  StandardFormLP lp = toy_lp();
  Iterate it;
  it.x = Vector::Constant(2, 1.0);
  it.y = Vector::Zero(1);
  it.z = Vector(2);
  it.z << 2, 3;
  it.mu = 0.5;
  KktSystem sys = assemble_kkt(lp.A, it, 0.0, 0.0);
  Residuals res = compute_residuals(lp, it);
  Vector rhs = assemble_rhs(res, it);

  Vector exact = test::dense_sym_solve(to_dense(sys.K), rhs);
  CHECK(inexactness_ratio(sys, rhs, exact) <= 1e-12);
  CHECK(inexactness_ratio(sys, rhs, Vector::Zero(3)) == 1.0);
  CHECK(inexactness_ratio(sys, Vector::Zero(3), Vector::Zero(3)) == 0.0);
  CHECK(std::isinf(inexactness_ratio(sys, Vector::Zero(3), exact)));
}

TEST_CASE("residual linearity along a direction") {
  std::mt19937 rng(23);
  test::PlantedLp gen = test::planted_lp(3, 6, rng);
  Iterate it = test::random_interior(gen.lp, rng);
  Residuals res = compute_residuals(gen.lp, it);
  Directions d = dense_newton(gen.lp, it, res);
  for (double alpha : {0.25, 0.5, 1.0}) {
    Iterate next = it;
    next.x += alpha * d.d_x;
    next.y += alpha * d.d_y;
    next.z += alpha * d.d_z;
    Residuals rn = compute_residuals(gen.lp, next);
    CHECK(rn.norm_p <= (1 - alpha) * res.norm_p + 1e-12 * (1 + res.norm_p));
    CHECK(rn.norm_d <= (1 - alpha) * res.norm_d + 1e-12 * (1 + res.norm_d));
  }
}
