#pragma once

// Small analytic problems with known solutions or dense reference solves.

#include <cmath>
#include <random>

#include "padmm/admm.hpp"
#include "padmm/experiment.hpp"
#include "padmm/pdhgm.hpp"
#include "support.hpp"

namespace padmm::test {

inline BlockVector random_column(std::size_t m, std::uint64_t seed) {
  return random_like(single(ComplexField(1, m)), seed);
}

/// min 1/2|u - a|^2 + 1/2|v - b|^2  s.t.  u - v = 0.
/// Saddle point: u = v = (a + b)/2, mu = (a - b)/2.
struct QuadraticToy {
  BlockVector a, b;
  FunctionConstraint f;
  SeparableProx h, j;

  BlockVector u_star() const { return 0.5 * (a + b); }
  BlockVector mu_star() const { return 0.5 * (a - b); }
  BlockVector zero() const { return a.zeros_like(); }
  SolverState initial() const { return make_initial_state(zero(), zero(), zero()); }
};

inline QuadraticToy quadratic_toy(std::size_t m, std::uint64_t seed) {
  BlockVector a = random_column(m, seed);
  BlockVector b = random_column(m, seed + 1);
  FunctionConstraint f(
      [](const BlockVector& u, const BlockVector& v) { return u - v; },
      [](const BlockVector& u, const BlockVector&) { return LinearMap::scaled_identity(u, 1.0); },
      [](const BlockVector&, const BlockVector& v) { return LinearMap::scaled_identity(v, -1.0); },
      a.zeros_like());
  SeparableProx h({ProxOp::squared_distance(1.0, a[0])});
  SeparableProx j({ProxOp::squared_distance(1.0, b[0])});
  return {a, b, std::move(f), std::move(h), std::move(j)};
}

inline double saddle_distance(const QuadraticToy& toy, const SolverState& s) {
  return std::max({norm2(s.u - toy.u_star()), norm2(s.v - toy.u_star()), norm2(s.mu - toy.mu_star())});
}

/// Dense nonlinear instance on C^m:
///   F(u, v) = M u + u.*u - N v - v.*v,  H = h/2 |u - p|^2,  J = j/2 |v - q|^2.
struct DenseInstance {
  Mat m, n;
  BlockVector c, p, q;
  double h = 0.8, j = 1.5;
  FunctionConstraint f;
  SeparableProx prox_h, prox_j;
};

inline Vec col(const BlockVector& x) { return to_eigen(x); }

inline DenseInstance dense_instance(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  Mat m(d, d), n(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      m(r, c) = Complex(g(rng), g(rng)) / std::sqrt(2.0 * dim);
      n(r, c) = Complex(g(rng), g(rng)) / std::sqrt(2.0 * dim);
    }
  }
  const BlockVector layout = single(ComplexField(1, dim));
  BlockVector c = random_column(dim, seed + 11);
  BlockVector p = random_column(dim, seed + 12);
  BlockVector q = random_column(dim, seed + 13);

  auto matrix_map = [layout](Mat a) {
    return LinearMap([a, layout](const BlockVector& x) { return from_eigen(layout, a * to_eigen(x)); },
                     [a, layout](const BlockVector& y) { return from_eigen(layout, a.adjoint() * to_eigen(y)); },
                     layout, layout);
  };
  FunctionConstraint f(
      [m, n, layout](const BlockVector& u, const BlockVector& v) {
        const Vec x = to_eigen(u), y = to_eigen(v);
        return from_eigen(layout, m * x + x.cwiseProduct(x) - n * y - y.cwiseProduct(y));
      },
      [m, matrix_map](const BlockVector& u, const BlockVector&) {
        return matrix_map(Mat(m + 2.0 * to_eigen(u).asDiagonal().toDenseMatrix()));
      },
      [n, matrix_map](const BlockVector&, const BlockVector& v) {
        return matrix_map(Mat(-n - 2.0 * to_eigen(v).asDiagonal().toDenseMatrix()));
      },
      c);
  DenseInstance inst{m, n, c, p, q, 0.8, 1.5, std::move(f), {}, {}};
  inst.prox_h = SeparableProx({ProxOp::squared_distance(inst.h, p[0])});
  inst.prox_j = SeparableProx({ProxOp::squared_distance(inst.j, q[0])});
  return inst;
}

struct PinResult {
  double u_error = 0.0;          // prox-form u vs surrogate solve with Q = I/tau - delta A*A
  double v_error = 0.0;
  double literal_u_error = 0.0;  // same with Q = tau I - delta A*A, for reference
};

/// Takes two ADMM steps and checks the second against direct minimization of
/// the surrogate-augmented subproblems
///   min_u H(u) + Re<mu, A u> + delta/2 |A u - c1|^2 + 1/2 |u - u^k|^2_Q1
///   min_v J(v) + Re<mu, B v> + delta/2 |B v - c2|^2 + 1/2 |v - v^k|^2_Q2.
inline PinResult dense_pin(std::size_t dim, std::uint64_t seed) {
  const auto inst = dense_instance(dim, seed);
  SolverConfig cfg;
  cfg.delta = 0.7;
  cfg.theta = 0.9;
  cfg.power_iter_tol = 1e-13;
  cfg.power_iter_max = 5000;
  const auto s0 = make_initial_state(random_column(dim, seed + 21), random_column(dim, seed + 22),
                                     random_column(dim, seed + 23));
  const auto s1 = admm_step(s0, inst.f, inst.prox_h, inst.prox_j, cfg);
  const auto s2 = admm_step(s1, inst.f, inst.prox_h, inst.prox_j, cfg);
  const double delta = cfg.delta;
  const auto d = static_cast<Eigen::Index>(dim);
  const Mat eye = Mat::Identity(d, d);

  const auto lin_u = linearize_u(inst.f, s1.u, s1.v);
  const Mat a = dense(lin_u.map);
  const Vec c1 = col(lin_u.shifted_target), mu = col(s1.mu), u1 = col(s1.u), p = col(inst.p);
  const double tau1 = s2.history.back().tau1;
  auto solve_u = [&](const Mat& q1) {
    const Mat lhs = delta * a.adjoint() * a + inst.h * eye + q1;
    const Vec rhs = delta * a.adjoint() * c1 - a.adjoint() * mu + inst.h * p + q1 * u1;
    return Vec(lhs.fullPivLu().solve(rhs));
  };
  const Vec u_ref = solve_u((1.0 / tau1) * eye - delta * a.adjoint() * a);
  const Vec u_lit = solve_u(tau1 * eye - delta * a.adjoint() * a);

  const auto lin_v = linearize_v(inst.f, s2.u, s1.v);
  const Mat b = dense(lin_v.map);
  const Vec c2 = col(lin_v.shifted_target), v1 = col(s1.v), q = col(inst.q);
  const double tau2 = s2.history.back().tau2;
  const Mat q2 = (1.0 / tau2) * eye - delta * b.adjoint() * b;
  const Mat lhs_v = delta * b.adjoint() * b + inst.j * eye + q2;
  const Vec rhs_v = delta * b.adjoint() * c2 - b.adjoint() * mu + inst.j * q + q2 * v1;
  const Vec v_ref = lhs_v.fullPivLu().solve(rhs_v);

  PinResult r;
  r.u_error = (col(s2.u) - u_ref).norm() / std::max(1.0, u_ref.norm());
  r.v_error = (col(s2.v) - v_ref).norm() / std::max(1.0, v_ref.norm());
  r.literal_u_error = (col(s2.u) - u_lit).norm() / std::max(1.0, u_lit.norm());
  return r;
}

/// 2-coil MRI instance on a small grid from the simulation pipeline.
inline harness::ExperimentConfig small_mri_config(std::size_t size, std::size_t coils, int iterations) {
  harness::ExperimentConfig cfg;
  cfg.phantom.size = size;
  cfg.phantom.coils = coils;
  cfg.sampling.tolerance = 0.05;
  cfg.solver.iterations = iterations;
  cfg.weights.lambda_scale = 10.0;
  cfg.solver.delta = 0.3;
  return cfg;
}

struct MriInstance {
  harness::Dataset data;
  mri::MriProblem problem;
  mri::MriConstraint f;
  SeparableProx h, j;
  SolverConfig cfg;
};

inline MriInstance mri_instance(const harness::ExperimentConfig& cfg) {
  auto d = harness::simulate(cfg);
  auto p = harness::make_problem(d, cfg);
  auto f = mri::assemble_constraint(p);
  auto h = mri::assemble_prox_h(p);
  auto j = mri::assemble_prox_j(p);
  return {std::move(d), std::move(p), std::move(f), std::move(h), std::move(j), cfg.solver_config()};
}

}  // namespace padmm::test
