#pragma once

#include <concepts>
#include <functional>
#include <vector>

#include "padmm/block_vector.hpp"
#include "padmm/linear_map.hpp"

namespace padmm {

/// A constraint F(u, v) = c. Jacobians are the complex-linear derivatives with
/// respect to each block, frozen at the given base point. Only constraints that
/// are holomorphic (in practice multilinear) in each argument are supported;
/// no Wirtinger calculus is applied.
template <class C>
concept NonlinearConstraint = requires(const C& f, const BlockVector& u, const BlockVector& v) {
  { f.eval(u, v) } -> std::convertible_to<BlockVector>;
  { f.jac_u(u, v) } -> std::convertible_to<LinearMap>;
  { f.jac_v(u, v) } -> std::convertible_to<LinearMap>;
  { f.target() } -> std::convertible_to<const BlockVector&>;
};

/// Constraint assembled from callables; used for small analytic problems.
class FunctionConstraint {
 public:
  using Eval = std::function<BlockVector(const BlockVector&, const BlockVector&)>;
  using Jacobian = std::function<LinearMap(const BlockVector&, const BlockVector&)>;

  FunctionConstraint(Eval eval, Jacobian jac_u, Jacobian jac_v, BlockVector target)
      : eval_(std::move(eval)),
        jac_u_(std::move(jac_u)),
        jac_v_(std::move(jac_v)),
        target_(std::move(target)) {}

  BlockVector eval(const BlockVector& u, const BlockVector& v) const { return eval_(u, v); }
  LinearMap jac_u(const BlockVector& u, const BlockVector& v) const { return jac_u_(u, v); }
  LinearMap jac_v(const BlockVector& u, const BlockVector& v) const { return jac_v_(u, v); }
  const BlockVector& target() const noexcept { return target_; }

 private:
  Eval eval_;
  Jacobian jac_u_;
  Jacobian jac_v_;
  BlockVector target_;
};

/// Frozen Taylor data for one half-step: the Jacobian and the shifted target
/// (c1 = c + A u_k - F(u_k, v_k) for the u-step, c2 = c + B v_k - F(u_{k+1}, v_k)
/// for the v-step).
struct Linearization {
  LinearMap map;
  BlockVector shifted_target;
};

template <NonlinearConstraint C>
Linearization linearize_u(const C& f, const BlockVector& u_k, const BlockVector& v_k) {
  LinearMap a = f.jac_u(u_k, v_k);
  BlockVector c1 = f.target() + a.apply(u_k) - f.eval(u_k, v_k);
  return {std::move(a), std::move(c1)};
}

template <NonlinearConstraint C>
Linearization linearize_v(const C& f, const BlockVector& u_kp1, const BlockVector& v_k) {
  LinearMap b = f.jac_v(u_kp1, v_k);
  BlockVector c2 = f.target() + b.apply(v_k) - f.eval(u_kp1, v_k);
  return {std::move(b), std::move(c2)};
}

/// Relative error between the central finite difference
/// (g(x + eps d) - g(x - eps d)) / (2 eps) and the supplied directional derivative.
inline double fd_directional_error(const std::function<BlockVector(const BlockVector&)>& g,
                                   const BlockVector& base, const BlockVector& direction,
                                   const BlockVector& derivative, double eps) {
  BlockVector plus = base;
  plus.axpy(eps, direction);
  BlockVector minus = base;
  minus.axpy(-eps, direction);
  BlockVector fd = g(plus) - g(minus);
  fd *= 1.0 / (2.0 * eps);
  const double denom = norm2(derivative);
  const double err = norm2(fd - derivative);
  return denom == 0.0 ? err : err / denom;
}

/// Finite-difference check of jac_u at (u, v) along direction h.
template <NonlinearConstraint C>
double fd_jacobian_check_u(const C& f, const BlockVector& u, const BlockVector& v,
                           const BlockVector& h, double eps) {
  return fd_directional_error([&](const BlockVector& x) { return f.eval(x, v); }, u, h,
                              f.jac_u(u, v).apply(h), eps);
}

/// Finite-difference check of jac_v at (u, v) along direction h.
template <NonlinearConstraint C>
double fd_jacobian_check_v(const C& f, const BlockVector& u, const BlockVector& v,
                           const BlockVector& h, double eps) {
  return fd_directional_error([&](const BlockVector& x) { return f.eval(u, x); }, v, h,
                              f.jac_v(u, v).apply(h), eps);
}

/// Flattens all samples in block order.
inline std::vector<Complex> flatten(const BlockVector& x) {
  std::vector<Complex> out;
  out.reserve(x.sample_count());
  x.for_each_sample([&](const Complex& s) { out.push_back(s); });
  return out;
}

/// Inverse of flatten, using `layout` for block kinds and shapes.
inline BlockVector unflatten(const BlockVector& layout, const std::vector<Complex>& values) {
  if (values.size() != layout.sample_count()) throw ShapeError("unflatten: size mismatch");
  BlockVector out = layout.zeros_like();
  std::size_t i = 0;
  out.for_each_sample([&](Complex& s) { s = values[i++]; });
  return out;
}

/// Dense column-major materialization of a small map (test oracle only).
/// Every domain block must have at most 64 samples per component.
inline std::vector<std::vector<Complex>> materialize_columns(const LinearMap& map) {
  for (const auto& b : map.domain()) {
    const bool small = std::visit(
        [](const auto& a) { return static_cast<std::size_t>(a.width() * a.height()) <= 64; }, b);
    if (!small) throw ShapeError("materialize_columns: blocks larger than 8x8 are not supported");
  }
  const std::size_t n = map.domain().sample_count();
  std::vector<std::vector<Complex>> cols;
  cols.reserve(n);
  std::vector<Complex> e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), Complex{});
    e[j] = 1.0;
    cols.push_back(flatten(map.apply(unflatten(map.domain(), e))));
  }
  return cols;
}

}  // namespace padmm
