#include <doctest.h>

#include "oracles.hpp"
#include "toys.hpp"

using namespace padmm;
using namespace padmm::test;

TEST_CASE("G = I with H = 0 drives u to the data") {
  // min_u 1/2 |u - b|^2 written as H = 0, J(v) = 1/2 |v - b|^2, F = u - v.
  auto toy = quadratic_toy(5, 21);
  toy.h = SeparableProx::zero(1);
  SolverConfig cfg;
  cfg.tau2 = 1.0;
  const auto problem = make_separable(toy.f, toy.zero());
  PdhgmState s;
  s.u = toy.zero();
  s.mu = toy.zero();
  s.mu_bar = toy.zero();
  const auto r = run_pdhgm(s, problem, toy.h, toy.j, cfg);
  CHECK(norm2(r.state.u - toy.b) < 1e-8);
  CHECK(norm2(r.state.mu) < 1e-8);
}

TEST_CASE("with tau2 = 1/delta the v-step eliminates through Moreau") {
  const auto toy = quadratic_toy(4, 3);
  SolverConfig cfg;
  cfg.delta = 0.6;
  cfg.tau2 = 1.0 / cfg.delta;
  const auto s0 = make_initial_state(random_column(4, 1), random_column(4, 2), random_column(4, 3));
  const auto s1 = admm_step(s0, toy.f, toy.h, toy.j, cfg);

  // v+ = prox_{J/delta}(G(u+) - c + mu/delta), independent of v^k
  const BlockVector arg = s1.u + (1.0 / cfg.delta) * s0.mu;
  CHECK(norm2(s1.v - toy.j(arg, 1.0 / cfg.delta)) < 1e-14);

  // mu+ = (I + delta dJ*)^{-1}(mu + delta (G(u+) - c)), from the closed-form conjugate.
  const auto& op = toy.j.children()[0];
  const BlockVector z = s0.mu + cfg.delta * s1.u;
  CHECK(norm2(s1.mu - conjugate_prox(op, z, cfg.delta)) < 1e-13);
}

TEST_CASE("ADMM and dual-first iterates coincide after alignment") {
  SUBCASE("quadratic toy") {
    const auto toy = quadratic_toy(4, 8);
    SolverConfig cfg;
    cfg.delta = 0.8;
    const auto init = make_initial_state(random_column(4, 1), toy.zero(), random_column(4, 2));
    const auto r = equivalence_check(toy.f, toy.h, toy.j, init, cfg, 60);
    CHECK(r.iterations == 60);
    CHECK(r.max_u_deviation <= 1e-8);
    CHECK(r.max_mu_deviation <= 1e-8);
  }
  SUBCASE("16x16 two-coil MRI") {
    const auto m = mri_instance(small_mri_config(16, 2, 50));
    const auto init = make_initial_state(mri::initial_u(m.f), m.f.v_layout(), m.f.v_layout());
    const auto r = equivalence_check(m.f, m.h, m.j, init, m.cfg, 50);
    CHECK(r.max_u_deviation <= 1e-8);
    CHECK(r.max_mu_deviation <= 1e-8);
  }
}

TEST_CASE("dual-first steps satisfy the preconditioned inclusion") {
  const auto m = mri_instance(small_mri_config(12, 2, 10));
  const auto problem = make_separable(m.f, m.f.v_layout());
  PdhgmState s;
  s.u = mri::initial_u(m.f);
  s.mu = m.f.v_layout();
  s.mu_bar = s.mu;
  for (int k = 0; k < 15; ++k) {
    const auto prev = s;
    pdhgm_advance(s, problem, m.h, m.j, m.cfg);
    CHECK(pdhgm_inclusion_residual(prev, s, problem, m.h, m.j, m.cfg.delta) < 1e-12);
  }

  // A corrupted step is detected.
  auto prev = s;
  pdhgm_advance(s, problem, m.h, m.j, m.cfg);
  s.u.field(0)[3] += 1e-3;
  CHECK(pdhgm_inclusion_residual(prev, s, problem, m.h, m.j, m.cfg.delta) > 1e-6);
}

TEST_CASE("alignment helper copies the primal iterate and initial dual") {
  const auto toy = quadratic_toy(3, 4);
  const auto init = make_initial_state(random_column(3, 1), toy.zero(), random_column(3, 2));
  SolverConfig cfg;
  const auto first = admm_step(init, toy.f, toy.h, toy.j, cfg);
  const auto s = pdhgm_after_first_admm_step(init, first);
  CHECK(s.u == first.u);
  CHECK(s.mu == init.mu);
  CHECK(s.k == 1);
}
