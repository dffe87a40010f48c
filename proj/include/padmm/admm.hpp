#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "padmm/block_vector.hpp"
#include "padmm/constraint.hpp"
#include "padmm/linear_map.hpp"
#include "padmm/prox.hpp"

namespace padmm {

/// Raised when an iterate stops being finite; carries the iteration index.
class SolverAbort : public std::runtime_error {
 public:
  SolverAbort(int iteration, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

struct SolverConfig {
  double delta = 1.0;  // augmented Lagrangian penalty
  double theta = 0.99;  // step sizes are theta / (delta |op|^2)
  int max_iterations = 1500;
  double power_iter_tol = 1e-8;
  int power_iter_max = 500;
  std::optional<double> tau2;  // fixed v-step, e.g. 1/delta when B = -I
  std::optional<double> residual_tol;  // optional early stop on |F(u,v) - c|
  std::uint64_t seed = 0;

  void validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
    if (!(power_iter_tol > 0.0)) throw std::invalid_argument("power_iter_tol must be > 0");
    if (power_iter_max < 1) throw std::invalid_argument("power_iter_max must be >= 1");
    if (tau2 && !(*tau2 > 0.0)) throw std::invalid_argument("tau2 override must be > 0");
  }

  PowerIterationOptions power_options() const { return {power_iter_tol, power_iter_max, seed}; }
};

struct IterationRecord {
  double residual = 0.0;  // |F(u^{k+1}, v^{k+1}) - c|
  double u_change = 0.0;  // |u^{k+1} - u^k|
  double v_change = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  bool power_iteration_converged = true;
};

struct SolverState {
  BlockVector u;
  BlockVector v;
  BlockVector mu;
  BlockVector mu_bar;
  int k = 0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  // Power-iteration warm starts carried between iterations.
  BlockVector a_vector;
  BlockVector b_vector;
  std::vector<IterationRecord> history;
};

/// Initial state with mu_bar^0 = mu^0.
inline SolverState make_initial_state(BlockVector u0, BlockVector v0, BlockVector mu0) {
  SolverState s;
  s.u = std::move(u0);
  s.v = std::move(v0);
  s.mu_bar = mu0;
  s.mu = std::move(mu0);
  return s;
}

/// Step size theta / (delta |op|^2); zero operators get theta / delta.
inline double step_size(double theta, double delta, double op_norm) {
  const double n2 = op_norm * op_norm;
  return n2 > 0.0 ? theta / (delta * n2) : theta / delta;
}

namespace detail {
inline void require_finite(const BlockVector& x, int k, const char* name) {
  if (!x.all_finite()) throw SolverAbort(k, std::string("non-finite values in ") + name);
}
}  // namespace detail

/// One iteration of preconditioned ADMM with linearized nonlinear constraint:
///
///   A^k      = d_u F(u^k, v^k),        tau1 = theta / (delta |A^k|^2)
///   u^{k+1}  = prox_H(u^k - tau1 A^k* mubar^k, tau1)
///   B^k      = d_v F(u^{k+1}, v^k),    tau2 = theta / (delta |B^k|^2) or override
///   v^{k+1}  = prox_J(v^k - tau2 B^k* (mu^k + delta (F(u^{k+1}, v^k) - c)), tau2)
///   mu^{k+1} = mu^k + delta (F(u^{k+1}, v^{k+1}) - c)
///   mubar^{k+1} = 2 mu^{k+1} - mu^k
///
/// The proximal form is what remains of the linearized subproblems after adding
/// the surrogate 1/2 |x - x^k|^2_Q with Q = (1/tau) I - delta op* op, which is
/// positive definite exactly when tau delta |op|^2 < 1.
///
/// Advances `state` in place. Offers the strong guarantee: on SolverAbort (or
/// any other exception) `state` is left untouched.
template <NonlinearConstraint C, BlockProx PH, BlockProx PJ>
void admm_advance(SolverState& state, const C& f, const PH& prox_h, const PJ& prox_j,
                  const SolverConfig& cfg) {
  const double delta = cfg.delta;
  const auto popts = cfg.power_options();
  IterationRecord rec;

  const LinearMap a = f.jac_u(state.u, state.v);
  auto norm_a = estimate_opnorm(a, popts, state.a_vector.empty() ? nullptr : &state.a_vector);
  const double tau1 = step_size(cfg.theta, delta, norm_a.value);
  BlockVector u_next = state.u;
  u_next.axpy(-tau1, a.adjoint(state.mu_bar));
  u_next = prox_h(u_next, tau1);
  detail::require_finite(u_next, state.k, "u");

  const LinearMap b = f.jac_v(u_next, state.v);
  auto norm_b = estimate_opnorm(b, popts, state.b_vector.empty() ? nullptr : &state.b_vector);
  const double tau2 = cfg.tau2 ? *cfg.tau2 : step_size(cfg.theta, delta, norm_b.value);
  BlockVector dual_arg = state.mu;
  dual_arg.axpy(delta, f.eval(u_next, state.v) - f.target());
  BlockVector v_next = state.v;
  v_next.axpy(-tau2, b.adjoint(dual_arg));
  v_next = prox_j(v_next, tau2);
  detail::require_finite(v_next, state.k, "v");

  BlockVector residual = f.eval(u_next, v_next) - f.target();
  BlockVector mu_next = state.mu;
  mu_next.axpy(delta, residual);
  detail::require_finite(mu_next, state.k, "mu");

  rec.residual = norm2(residual);
  rec.u_change = norm2(u_next - state.u);
  rec.v_change = norm2(v_next - state.v);
  rec.tau1 = tau1;
  rec.tau2 = tau2;
  rec.norm_a = norm_a.value;
  rec.norm_b = norm_b.value;
  rec.power_iteration_converged = norm_a.converged && norm_b.converged;

  state.mu_bar = 2.0 * mu_next - state.mu;
  state.u = std::move(u_next);
  state.v = std::move(v_next);
  state.mu = std::move(mu_next);
  state.tau1 = tau1;
  state.tau2 = tau2;
  if (!norm_a.vector.empty()) state.a_vector = std::move(norm_a.vector);
  if (!norm_b.vector.empty()) state.b_vector = std::move(norm_b.vector);
  state.history.push_back(rec);
  ++state.k;
}

template <NonlinearConstraint C, BlockProx PH, BlockProx PJ>
SolverState admm_step(SolverState state, const C& f, const PH& prox_h, const PJ& prox_j,
                      const SolverConfig& cfg) {
  admm_advance(state, f, prox_h, prox_j, cfg);
  return state;
}

struct ConvergenceReport {
  enum class Status { completed, residual_reached, aborted };
  Status status = Status::completed;
  std::string message;
  int iterations = 0;
  std::vector<IterationRecord> history;
  double wall_ms = 0.0;

  double final_residual() const { return history.empty() ? 0.0 : history.back().residual; }
};

inline const char* to_string(ConvergenceReport::Status s) {
  switch (s) {
    case ConvergenceReport::Status::completed:
      return "completed";
    case ConvergenceReport::Status::residual_reached:
      return "residual_reached";
    case ConvergenceReport::Status::aborted:
      return "aborted";
  }
  return "unknown";
}

struct RunResult {
  SolverState state;
  ConvergenceReport report;
};

using IterationCallback = std::function<void(const SolverState&)>;

/// Runs admm_step up to cfg.max_iterations times. A non-finite iterate aborts
/// the run; the last finite state is returned with status `aborted`.
template <NonlinearConstraint C, BlockProx PH, BlockProx PJ>
RunResult run_admm(SolverState state, const C& f, const PH& prox_h, const PJ& prox_j,
                   const SolverConfig& cfg, const IterationCallback& callback = {}) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ConvergenceReport report;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    try {
      admm_advance(state, f, prox_h, prox_j, cfg);
    } catch (const SolverAbort& e) {
      report.status = ConvergenceReport::Status::aborted;
      report.message = e.what();
      break;
    }
    if (callback) callback(state);
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

}  // namespace padmm
