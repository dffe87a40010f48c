#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

#include "padmm/admm.hpp"

namespace padmm {

/// Constraint of the separable form F(u, v) = G(u) - v. The operator G is read
/// off the wrapped constraint as G(u) = F(u, 0); jac_v of F must be -I.
template <NonlinearConstraint C>
struct SeparableProblem {
  const C* constraint = nullptr;
  BlockVector v_layout;  // zero vector in the v/mu layout

  /// G(u) - c.
  BlockVector shifted_operator(const BlockVector& u) const {
    return constraint->eval(u, v_layout) - constraint->target();
  }
  LinearMap jacobian(const BlockVector& u) const { return constraint->jac_u(u, v_layout); }
};

template <NonlinearConstraint C>
SeparableProblem<C> make_separable(const C& f, BlockVector v_layout) {
  return {&f, v_layout.zeros_like()};
}

/// Iterates of the dual-first scheme. Extrapolation acts on the dual variable.
struct PdhgmState {
  BlockVector mu;
  BlockVector mu_bar;
  BlockVector u;
  int k = 0;
  double tau1 = 0.0;
  BlockVector a_vector;  // power-iteration warm start
  std::vector<IterationRecord> history;
};

/// One step of the dual-first scheme:
///
///   mu^{k+1}    = (I + delta dJ*)^{-1}(mu^k + delta (G(u^k) - c))
///   mubar^{k+1} = 2 mu^{k+1} - mu^k
///   u^{k+1}     = prox_H(u^k - tau1 JG(u^k)* mubar^{k+1}, tau1),
///                 tau1 = theta / (delta |JG(u^k)|^2)
///
/// The conjugate resolvent is evaluated through Moreau's identity.
template <NonlinearConstraint C, BlockProx PH, BlockProx PJ>
void pdhgm_advance(PdhgmState& state, const SeparableProblem<C>& problem, const PH& prox_h,
                   const PJ& prox_j, const SolverConfig& cfg) {
  const double delta = cfg.delta;
  IterationRecord rec;

  BlockVector b = problem.shifted_operator(state.u);
  b.axpy(1.0 / delta, state.mu);
  BlockVector mu_next = prox_conjugate(prox_j, b, delta);
  detail::require_finite(mu_next, state.k, "mu");
  BlockVector mu_bar = 2.0 * mu_next - state.mu;

  const LinearMap a = problem.jacobian(state.u);
  auto norm_a = estimate_opnorm(a, cfg.power_options(),
                                state.a_vector.empty() ? nullptr : &state.a_vector);
  const double tau1 = step_size(cfg.theta, delta, norm_a.value);
  BlockVector u_next = state.u;
  u_next.axpy(-tau1, a.adjoint(mu_bar));
  u_next = prox_h(u_next, tau1);
  detail::require_finite(u_next, state.k, "u");

  rec.u_change = norm2(u_next - state.u);
  rec.tau1 = tau1;
  rec.tau2 = 1.0 / delta;
  rec.norm_a = norm_a.value;
  rec.norm_b = 1.0;
  rec.power_iteration_converged = norm_a.converged;
  // Implicit v = G(u^k) - c - (mu^{k+1} - mu^k) / delta, hence the residual.
  rec.residual = norm2(mu_next - state.mu) / delta;

  state.u = std::move(u_next);
  state.mu_bar = std::move(mu_bar);
  state.mu = std::move(mu_next);
  state.tau1 = tau1;
  if (!norm_a.vector.empty()) state.a_vector = std::move(norm_a.vector);
  state.history.push_back(rec);
  ++state.k;
}

template <NonlinearConstraint C, BlockProx PH, BlockProx PJ>
PdhgmState pdhgm_step(PdhgmState state, const SeparableProblem<C>& problem, const PH& prox_h,
                      const PJ& prox_j, const SolverConfig& cfg) {
  pdhgm_advance(state, problem, prox_h, prox_j, cfg);
  return state;
}

struct PdhgmRunResult {
  PdhgmState state;
  ConvergenceReport report;
};

template <NonlinearConstraint C, BlockProx PH, BlockProx PJ>
PdhgmRunResult run_pdhgm(PdhgmState state, const SeparableProblem<C>& problem, const PH& prox_h,
                         const PJ& prox_j, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ConvergenceReport report;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    try {
      pdhgm_advance(state, problem, prox_h, prox_j, cfg);
    } catch (const SolverAbort& e) {
      report.status = ConvergenceReport::Status::aborted;
      report.message = e.what();
      break;
    }
    if (cfg.residual_tol && state.history.back().residual <= *cfg.residual_tol) {
      report.status = ConvergenceReport::Status::residual_reached;
      break;
    }
  }
  report.iterations = state.k;
  report.history = state.history;
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return {std::move(state), std::move(report)};
}

/// Residual of the inclusion N(mu+, u+) + L(mu+ - mu, u+ - u) in 0 for one
/// dual-first step, with
///
///   N = ( dJ*(mu+) - JG(u) u+ - (G(u) - JG(u) u) ;  dH(u+) + JG(u)* mu+ )
///   L = ( I/delta , JG(u) ; JG(u)* , I/tau1 ).
///
/// The inclusion fixes candidate subgradients y in dJ*(mu+) and x in dH(u+);
/// membership is then tested through the resolvents,
///   mu+ = (I + delta dJ*)^{-1}(mu+ + delta y),  u+ = prox_H(u+ + tau1 x, tau1).
/// Returns the membership defect relative to max(1, |mu+| + |u+|).
template <NonlinearConstraint C, BlockProx PH, BlockProx PJ>
double pdhgm_inclusion_residual(const PdhgmState& prev, const PdhgmState& next,
                                const SeparableProblem<C>& problem, const PH& prox_h, const PJ& prox_j,
                                double delta) {
  const LinearMap jg = problem.jacobian(prev.u);
  const BlockVector g = problem.shifted_operator(prev.u);
  const double tau1 = next.tau1;
  const BlockVector du = next.u - prev.u;
  const BlockVector dmu = next.mu - prev.mu;

  // First row solved for the dJ* element (the JG terms cancel): y = G(u) - c - dmu/delta.
  BlockVector y = g;
  y.axpy(-1.0 / delta, dmu);
  // Second row solved for the dH element: x = -JG* (mu+ + dmu) - du/tau1.
  BlockVector x = -jg.adjoint(next.mu);
  x -= jg.adjoint(dmu);
  x.axpy(-1.0 / tau1, du);

  BlockVector mu_arg = next.mu;
  mu_arg.axpy(delta, y);
  const BlockVector mu_check = prox_conjugate(prox_j, (1.0 / delta) * mu_arg, delta) - next.mu;
  BlockVector u_arg = next.u;
  u_arg.axpy(tau1, x);
  const BlockVector u_check = prox_h(u_arg, tau1) - next.u;

  const double scale = std::max(1.0, norm2(next.mu) + norm2(next.u));
  return std::sqrt(squared_norm(mu_check) + squared_norm(u_check)) / scale;
}

/// Dual-first state aligned with an ADMM run: takes the initial mu and the
/// primal iterate and power-iteration vector of the first ADMM step, after
/// which both schemes produce the same u and mu sequences (see
/// equivalence_check).
inline PdhgmState pdhgm_after_first_admm_step(const SolverState& initial, const SolverState& first) {
  PdhgmState s;
  s.mu = initial.mu;
  s.mu_bar = initial.mu;
  s.u = first.u;
  s.k = first.k;
  s.tau1 = first.tau1;
  s.a_vector = first.a_vector;
  s.history = first.history;
  return s;
}

struct EquivalenceResult {
  double max_u_deviation = 0.0;   // max_k |u_admm - u_pdhgm| after alignment
  double max_mu_deviation = 0.0;  // same for mu
  int iterations = 0;
};

/// Runs Algorithm-1 ADMM (with tau2 = 1/delta) and the dual-first scheme from
/// matched initial data and compares iterates. The reordering shifts the
/// primal sequence by one: dual-first u after k steps equals ADMM u after
/// k + 1 steps, while the dual sequences coincide without shift. The dual-first
/// run therefore starts from ADMM's first u iterate (and its power-iteration
/// vector) with the initial mu.
template <NonlinearConstraint C, BlockProx PH, BlockProx PJ>
EquivalenceResult equivalence_check(const C& f, const PH& prox_h, const PJ& prox_j,
                                    const SolverState& initial, SolverConfig cfg,
                                    int iterations) {
  cfg.tau2 = 1.0 / cfg.delta;
  cfg.validate();
  const auto problem = make_separable(f, initial.v);

  SolverState admm = initial;
  admm_advance(admm, f, prox_h, prox_j, cfg);

  PdhgmState dual_first = pdhgm_after_first_admm_step(initial, admm);

  EquivalenceResult out;
  for (int k = 0; k < iterations; ++k) {
    const BlockVector admm_mu_prev = admm.mu;
    admm_advance(admm, f, prox_h, prox_j, cfg);
    pdhgm_advance(dual_first, problem, prox_h, prox_j, cfg);
    out.max_u_deviation = std::max(out.max_u_deviation, norm2(admm.u - dual_first.u));
    out.max_mu_deviation = std::max(out.max_mu_deviation, norm2(admm_mu_prev - dual_first.mu));
    ++out.iterations;
  }
  return out;
}

}  // namespace padmm
