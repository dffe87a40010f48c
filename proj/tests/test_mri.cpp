#include <doctest.h>

#include "oracles.hpp"
#include "toys.hpp"

using namespace padmm;
using namespace padmm::test;

TEST_CASE("coil operator on a 2x2 example") {
  ComplexField u(2, 2);
  u[0] = 1.0;
  u[1] = Complex(0.0, 2.0);
  u[2] = -1.0;
  u[3] = 0.5;
  ComplexField c1(2, 2, Complex(2.0));
  ComplexField c2(2, 2);
  c2[1] = Complex(0.0, 1.0);
  c2[3] = 4.0;
  const auto g = mri::coil_op(u, {c1, c2});
  REQUIRE(g.size() == 2);
  CHECK(g[0][1] == Complex(0.0, 4.0));
  CHECK(g[0][2] == Complex(-2.0));
  CHECK(g[1][0] == Complex(0.0));
  CHECK(g[1][1] == Complex(-2.0));
  CHECK(g[1][3] == Complex(2.0));
}

TEST_CASE("constraint Jacobians: adjoints and finite differences") {
  for (auto [n, w, h] : {std::tuple<std::size_t, std::size_t, std::size_t>{1, 1, 1}, {2, 5, 3}, {3, 8, 8}, {2, 32, 32}}) {
    CAPTURE(n);
    CAPTURE(w);
    const mri::MriConstraint f(n, w, h);
    const auto u = random_like(f.u_layout(), 1);
    const auto v = random_like(f.v_layout(), 2);
    const auto du = random_like(f.u_layout(), 3);
    const auto dv = random_like(f.v_layout(), 4);
    CHECK(adjoint_mismatch(f.jac_u(u, v), du, dv) <= 1e-12);
    CHECK(adjoint_mismatch(mri::coil_jacobian(u), du, random_like(mri::coil_jacobian(u).range(), 5)) <= 1e-12);
    CHECK(fd_jacobian_check_u(f, u, v, du, 1e-3) <= 1e-9);
    CHECK(fd_jacobian_check_v(f, u, v, dv, 1e-3) <= 1e-12);
    CHECK(norm2(f.jac_v(u, v).apply(dv) + dv) == 0.0);
  }
}

TEST_CASE("dense Jacobian on a tiny grid") {
  const mri::MriConstraint f(1, 2, 1);
  BlockVector u = f.u_layout();
  u.field(0)[0] = 2.0;
  u.field(0)[1] = 3.0;
  u.field(1)[0] = Complex(0.0, 1.0);
  u.field(1)[1] = 5.0;
  const Mat j = dense(f.jac_u(u, f.v_layout()));
  // rows: coil image (2), grad u0 (dx 2, dy 2), grad c1 (dx 2, dy 2)
  REQUIRE(j.rows() == 10);
  REQUIRE(j.cols() == 4);
  CHECK(j(0, 0) == Complex(0.0, 1.0));  // d(u0 c1)/du0 = c1
  CHECK(j(0, 2) == Complex(2.0));       // d(u0 c1)/dc1 = u0
  CHECK(j(1, 1) == Complex(5.0));
  CHECK(j(2, 0) == Complex(-1.0));      // dx u0 at pixel 0
  CHECK(j(2, 1) == Complex(1.0));
  CHECK(j(3, 1) == Complex(0.0));       // Neumann column
}

TEST_CASE("forward model is feasible with v = F(u, 0)") {
  const mri::MriConstraint f(2, 6, 4);
  const auto u = random_like(f.u_layout(), 9);
  CHECK(norm2(f.eval(u, f.forward(u))) == 0.0);
  CHECK(mri::MriConstraint::separable());
  CHECK_THROWS_AS(f.eval(u, mri::v_layout(3, 6, 4)), ShapeError);
  CHECK_THROWS_AS(f.forward(mri::u_layout(2, 4, 6)), ShapeError);
  CHECK_THROWS_AS(mri::MriConstraint(0, 4, 4), std::invalid_argument);
}

TEST_CASE("prox routing follows the block layout") {
  auto m = mri_instance(small_mri_config(8, 3, 1));
  auto& p = m.problem;
  const auto j = mri::assemble_prox_j(p);
  REQUIRE(j.size() == 7);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::holds_alternative<FourierFidelityProx>(j.children()[i].kind()));
  CHECK(std::holds_alternative<GroupShrinkProx>(j.children()[3].kind()));
  for (std::size_t i = 4; i < 7; ++i) CHECK(std::holds_alternative<GlobalShrinkProx>(j.children()[i].kind()));

  p.tv_mode = mri::TvMode::global;
  CHECK(std::holds_alternative<GlobalShrinkProx>(mri::assemble_prox_j(p).children()[3].kind()));
  CHECK(mri::assemble_prox_h(p).size() == 4);

  const auto u0 = mri::initial_u(m.f);
  for (const auto& b : u0) {
    for (const auto& z : std::get<ComplexField>(b).samples()) CHECK(z == Complex(1.0));
  }
}

TEST_CASE("problem validation") {
  auto m = mri_instance(small_mri_config(8, 2, 1));
  auto p = m.problem;
  p.lambda.pop_back();
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = m.problem;
  for (std::size_t i = 0; i < p.mask.size(); ++i) {
    if (p.mask[i] == Complex(0.0)) {
      p.data[0][i] = 1.0;
      break;
    }
  }
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = m.problem;
  p.alpha0 = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  const auto n = mri::normalize_weights(m.problem);
  double total = n.alpha0;
  for (double x : n.lambda) total += x;
  for (double x : n.alpha) total += x;
  CHECK(total == doctest::Approx(1.0));
}
