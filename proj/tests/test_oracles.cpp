#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/oracles.hpp"

using namespace augip;
using namespace augip::test;

TEST_CASE("dense_sym_solve basics") {
  Vector rhs = Vector::Random(4);
  Vector x = dense_sym_solve(Eigen::MatrixXd::Identity(4, 4), rhs);
  CHECK((x - rhs).norm() == 0.0);

  Eigen::MatrixXd S(2, 2);
  S << 0, 1, 1, 0;
  Vector r2(2);
  r2 << 1, 0;
  Vector y = dense_sym_solve(S, r2);
  CHECK(y[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(dense_sym_solve(Eigen::MatrixXd::Zero(3, 3), Vector::Ones(3)),
                  OracleError);
}

TEST_CASE("dense_sym_solve agrees with a Cholesky solve on SPD input") {
  std::mt19937 rng(5);
  Eigen::MatrixXd B = Eigen::MatrixXd::Random(30, 30);
  Eigen::MatrixXd K = B * B.transpose() + 30.0 * Eigen::MatrixXd::Identity(30, 30);
  Vector rhs = Vector::Random(30);
  Vector a = dense_sym_solve(K, rhs);
  Vector b = K.llt().solve(rhs);
  CHECK((a - b).norm() <= 1e-10 * (1 + b.norm()));
}

TEST_CASE("lp_vertex_oracle on the toy LP") {
  Triplets t(1, 2);
  t.add(0, 0, 1.0);
  t.add(0, 1, 1.0);
  StandardFormLP lp;
  lp.A = from_triplets(t);
  lp.b = Vector::Constant(1, 1.0);
  lp.c = Vector(2);
  lp.c << 2, 1;
  auto out = lp_vertex_oracle(lp);
  REQUIRE(out.has_value());
  CHECK(out->first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out->second[0] == doctest::Approx(0.0));
  CHECK(out->second[1] == doctest::Approx(1.0));
}

TEST_CASE("lp_vertex_oracle with a unique feasible point") {
  Triplets t(2, 2);
  t.add(0, 0, 1.0);
  t.add(1, 1, 1.0);
  StandardFormLP lp;
  lp.A = from_triplets(t);
  lp.b = Vector(2);
  lp.b << 1, 2;
  lp.c = Vector::Ones(2);
  auto out = lp_vertex_oracle(lp);
  REQUIRE(out.has_value());
  CHECK(out->first == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("lp_vertex_oracle detects infeasibility") {
  Triplets t(2, 1);
  t.add(0, 0, 1.0);
  t.add(1, 0, 1.0);
  StandardFormLP lp;
  lp.A = from_triplets(t);
  lp.b = Vector(2);
  lp.b << 1, 2;  // x = 1 and x = 2 simultaneously
  lp.c = Vector::Ones(1);
  CHECK_FALSE(lp_vertex_oracle(lp).has_value());
}

TEST_CASE("lp_vertex_oracle matches the planted optimum") {
  std::mt19937 rng(9);
  for (int rep = 0; rep < 5; ++rep) {
    PlantedLp gen = planted_lp(3, 8, rng);
    auto out = lp_vertex_oracle(gen.lp);
    REQUIRE(out.has_value());
    CHECK(out->first ==
          doctest::Approx(gen.objective).epsilon(1e-9));
  }
}

TEST_CASE("dense_inv_norm") {
  CHECK(dense_inv_norm(Eigen::MatrixXd::Identity(5, 5)) == 1.0);

  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(4, 4);
  for (int i = 1; i < 4; ++i) L(i, i - 1) = 2.0;
  CHECK(dense_inv_norm(L) == 15.0);

  std::mt19937 rng(15);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Random(6, 6);
    Eigen::MatrixXd U = Eigen::MatrixXd::Identity(6, 6);
    U.triangularView<Eigen::StrictlyLower>() = R;
    CHECK(dense_inv_norm(U) >= 1.0);
  }
}

TEST_CASE("planted_lp is primal-dual consistent") {
  std::mt19937 rng(25);
  for (int rep = 0; rep < 10; ++rep) {
    PlantedLp gen = planted_lp(5, 12, rng);
    CHECK((spmv(gen.lp.A, gen.x_star) - gen.lp.b).norm() <= 1e-12);
    Vector rd = spmv_transpose(gen.lp.A, gen.y_star) + gen.z_star - gen.lp.c;
    CHECK(rd.norm() <= 1e-12);
    CHECK(gen.x_star.minCoeff() >= 0.0);
    CHECK(gen.z_star.minCoeff() >= 0.0);
    CHECK(std::abs(gen.x_star.dot(gen.z_star)) <= 1e-14);
    CHECK(gen.objective == doctest::Approx(gen.lp.c.dot(gen.x_star)));
    // A has full row rank
    Eigen::MatrixXd Ad = to_dense(gen.lp.A);
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(Ad).rank() == 5);
  }
}

TEST_CASE("random_interior produces strictly positive iterates") {
  std::mt19937 rng(35);
  PlantedLp gen = planted_lp(4, 9, rng);
  Iterate it = random_interior(gen.lp, rng);
  CHECK(it.x.minCoeff() > 0.0);
  CHECK(it.z.minCoeff() > 0.0);
  CHECK(it.y.size() == 4);
}

TEST_CASE("reconstruct_dense and level_L_dense agree with a direct expansion") {
  std::mt19937 rng(45);
  SymLowerMatrix K = random_sym(25, 0.3, rng);
  FactorParams p;
  p.tau_L = 0.0;
  p.tau_S = 0.0;
  p.kappa = 1e12;
  p.final_dense_threshold = 5;
  MultilevelFactorization F = factor_multilevel(K, p);
  Eigen::MatrixXd R = reconstruct_dense(F);
  CHECK((R - to_dense(K)).norm() <= 1e-10 * to_dense(K).norm());
  for (const auto& lf : F.levels) {
    Eigen::MatrixXd L = level_L_dense(lf);
    for (Index i = 0; i < lf.order; ++i) CHECK(L(i, i) == 1.0);
  }
}

TEST_CASE("symbolic_factor_nnz on known patterns") {
  // dense order-3 lower triangle has 6 stored entries, no extra fill
  Eigen::MatrixXd M = Eigen::MatrixXd::Constant(3, 3, 1.0);
  Triplets t(3, 3);
  for (Index j = 0; j < 3; ++j)
    for (Index i = j; i < 3; ++i) t.add(i, j, 1.0);
  SymLowerMatrix K(from_triplets(t));
  std::vector<Index> id{0, 1, 2};
  CHECK(symbolic_factor_nnz(K, id) == 6);

  // arrowhead ordered vertex-first fills in completely
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
  for (Index i = 0; i < 4; ++i) A(i, i) = 1.0;
  for (Index i = 1; i < 4; ++i) A(i, 0) = 1.0;
  Triplets ta(4, 4);
  for (Index j = 0; j < 4; ++j)
    for (Index i = j; i < 4; ++i)
      if (A(i, j) != 0.0) ta.add(i, j, A(i, j));
  SymLowerMatrix Ka(from_triplets(ta));
  std::vector<Index> ida{0, 1, 2, 3};
  CHECK(symbolic_factor_nnz(Ka, ida) == 10);
  // vertex-last ordering keeps the arrow pattern with no fill
  std::vector<Index> last{3, 0, 1, 2};
  CHECK(symbolic_factor_nnz(Ka, last) == 7);
}
