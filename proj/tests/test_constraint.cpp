#include <doctest.h>

#include "oracles.hpp"
#include "toys.hpp"

using namespace padmm;
using namespace padmm::test;

static_assert(NonlinearConstraint<FunctionConstraint>);
static_assert(NonlinearConstraint<mri::MriConstraint>);

TEST_CASE("linearization reproduces the constraint at the expansion point") {
  const auto inst = dense_instance(5, 4);
  const auto u = random_column(5, 1);
  const auto v = random_column(5, 2);
  const auto lin = linearize_u(inst.f, u, v);
  // A u_k - c1 = F(u_k, v_k) - c
  CHECK(norm2((lin.map.apply(u) - lin.shifted_target) - (inst.f.eval(u, v) - inst.f.target())) < 1e-13);

  const auto lin_v = linearize_v(inst.f, u, v);
  CHECK(norm2((lin_v.map.apply(v) - lin_v.shifted_target) - (inst.f.eval(u, v) - inst.f.target())) < 1e-13);

  // First-order accuracy: the Taylor remainder of u.*u is exactly h.*h.
  const auto h = 1e-3 * random_column(5, 3);
  const auto exact = inst.f.eval(u + h, v) - inst.f.target();
  const auto model = lin.map.apply(u + h) - lin.shifted_target;
  const Vec hh = to_eigen(h).cwiseProduct(to_eigen(h));
  CHECK((to_eigen(exact - model) - hh).norm() < 1e-14);
}

TEST_CASE("finite-difference checks accept correct and reject wrong Jacobians") {
  const auto inst = dense_instance(6, 8);
  const auto u = random_column(6, 1);
  const auto v = random_column(6, 2);
  const auto du = random_column(6, 3);
  CHECK(fd_jacobian_check_u(inst.f, u, v, du, 1e-4) < 1e-8);
  CHECK(fd_jacobian_check_v(inst.f, u, v, du, 1e-4) < 1e-8);

  FunctionConstraint wrong(
      [&](const BlockVector& a, const BlockVector& b) { return inst.f.eval(a, b); },
      [&](const BlockVector& a, const BlockVector& b) { return inst.f.jac_v(a, b); },
      [&](const BlockVector& a, const BlockVector& b) { return inst.f.jac_v(a, b); }, inst.f.target());
  CHECK(fd_jacobian_check_u(wrong, u, v, du, 1e-4) > 1e-2);
}

TEST_CASE("dense Jacobian matches the analytic matrix") {
  const auto inst = dense_instance(4, 2);
  const auto u = random_column(4, 5);
  const Mat a = dense(inst.f.jac_u(u, u));
  const Mat ref = inst.m + 2.0 * Mat(to_eigen(u).asDiagonal());
  CHECK((a - ref).norm() < 1e-14);
}

TEST_CASE("materialization helper agrees with the dense oracle and refuses large fields") {
  const auto m = grad_map(8, 8);
  const auto cols = materialize_columns(m);
  const Mat ref = dense(m);
  REQUIRE(cols.size() == 64);
  double worst = 0.0;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < cols[j].size(); ++i) {
      worst = std::max(worst, std::abs(cols[j][i] - ref(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
  }
  CHECK(worst == 0.0);
  CHECK_THROWS_AS(materialize_columns(grad_map(9, 8)), ShapeError);
}
