#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "padmm/block_vector.hpp"
#include "padmm/constraint.hpp"
#include "padmm/linear_map.hpp"
#include "padmm/prox.hpp"

namespace padmm::mri {

// Block layout for n coils:
//   u = (u_0 spin density, u_1..u_n coil sensitivities)             1 + n fields
//   v = (v_0..v_{n-1} coil images, v_n grad of u_0,
//        v_{n+1}..v_{2n} grads of coil maps)                        n fields + (n + 1) gradients
// mu shares the v layout.

/// Regularizer applied to the spin-density gradient block.
enum class TvMode {
  isotropic,  // alpha_0 * sum_pixels |grad u_0|_2
  global,     // alpha_0 * |grad u_0|_2 over the whole field
};

struct MriProblem {
  ComplexField mask;               // binary k-space sampling pattern
  std::vector<ComplexField> data;  // zero-filled k-space per coil (S^T f_j)
  std::vector<double> lambda;      // data-fidelity weights, one per coil
  double alpha0 = 0.0;             // spin-density TV weight
  std::vector<double> alpha;       // coil-gradient weights, one per coil
  TvMode tv_mode = TvMode::isotropic;

  std::size_t coils() const noexcept { return data.size(); }
  std::size_t width() const noexcept { return mask.width(); }
  std::size_t height() const noexcept { return mask.height(); }

  void validate() const {
    if (data.empty()) throw std::invalid_argument("MriProblem: no coil data");
    if (lambda.size() != data.size() || alpha.size() != data.size()) {
      throw std::invalid_argument("MriProblem: need one lambda and one alpha per coil");
    }
    check_binary_mask(mask);
    for (const auto& f : data) {
      mask.check_shape(f);
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (mask[i] == Complex(0.0) && f[i] != Complex(0.0)) {
          throw std::invalid_argument("MriProblem: k-space data must vanish off the mask");
        }
      }
    }
    for (double l : lambda) check_nonnegative(l, "lambda");
    for (double a : alpha) check_nonnegative(a, "alpha");
    check_nonnegative(alpha0, "alpha0");
  }
};

/// Rescales all weights so that alpha_0 + sum lambda_j + sum alpha_j = 1.
inline MriProblem normalize_weights(MriProblem p) {
  const double total = p.alpha0 + std::accumulate(p.lambda.begin(), p.lambda.end(), 0.0) +
                       std::accumulate(p.alpha.begin(), p.alpha.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("normalize_weights: all weights are zero");
  p.alpha0 /= total;
  for (auto& l : p.lambda) l /= total;
  for (auto& a : p.alpha) a /= total;
  return p;
}

inline BlockVector u_layout(std::size_t n, std::size_t w, std::size_t h) {
  BlockVector u;
  for (std::size_t j = 0; j <= n; ++j) u.push_back(ComplexField(w, h));
  return u;
}

inline BlockVector v_layout(std::size_t n, std::size_t w, std::size_t h) {
  BlockVector v;
  for (std::size_t j = 0; j < n; ++j) v.push_back(ComplexField(w, h));
  for (std::size_t j = 0; j <= n; ++j) v.push_back(GradientField(w, h));
  return v;
}

/// Coil operator G(u, c_1..c_n) = (u c_1, ..., u c_n), pointwise.
inline std::vector<ComplexField> coil_op(const ComplexField& u, const std::vector<ComplexField>& coils) {
  std::vector<ComplexField> out;
  out.reserve(coils.size());
  for (const auto& c : coils) out.push_back(multiply(u, c));
  return out;
}

namespace detail {
inline void check_u(const BlockVector& u) {
  if (u.size() < 2) throw ShapeError("mri: u needs a spin-density block and at least one coil");
  for (std::size_t j = 1; j < u.size(); ++j) u.field(0).check_shape(u.field(j));
}
}  // namespace detail

/// Jacobian of the coil operator at (u_0, c_1..c_n), as a map from the u layout
/// to n coil images:
///   apply:   (h_0, .., h_n) -> (h_0 c_j + u_0 h_j)_j
///   adjoint: w -> (sum_j conj(c_j) w_j ; conj(u_0) w_1, .., conj(u_0) w_n)
inline LinearMap coil_jacobian(const BlockVector& base) {
  detail::check_u(base);
  const std::size_t n = base.size() - 1;
  const std::size_t w = base.field(0).width();
  const std::size_t h = base.field(0).height();
  BlockVector range;
  for (std::size_t j = 0; j < n; ++j) range.push_back(ComplexField(w, h));
  return LinearMap(
      [base, n](const BlockVector& x) {
        BlockVector y;
        for (std::size_t j = 1; j <= n; ++j) {
          ComplexField t = multiply(x.field(0), base.field(j));
          t += multiply(base.field(0), x.field(j));
          y.push_back(std::move(t));
        }
        return y;
      },
      [base, n](const BlockVector& y) {
        BlockVector x;
        ComplexField acc(base.field(0).width(), base.field(0).height());
        for (std::size_t j = 1; j <= n; ++j) acc += multiply_conj(base.field(j), y.field(j - 1));
        x.push_back(std::move(acc));
        for (std::size_t j = 1; j <= n; ++j) x.push_back(multiply_conj(base.field(0), y.field(j - 1)));
        return x;
      },
      base.zeros_like(), std::move(range));
}

/// F(u, v) = [G(u); grad u_0; ..; grad u_n] - v with target c = 0. Bilinear in u
/// through the coil rows, linear in v with d_v F = -I.
class MriConstraint {
 public:
  MriConstraint(std::size_t coils, std::size_t width, std::size_t height)
      : n_(coils), width_(width), height_(height), target_(mri::v_layout(coils, width, height)) {
    if (coils == 0) throw std::invalid_argument("MriConstraint: need at least one coil");
  }

  std::size_t coils() const noexcept { return n_; }
  BlockVector u_layout() const { return mri::u_layout(n_, width_, height_); }
  BlockVector v_layout() const { return mri::v_layout(n_, width_, height_); }

  /// [G(u); grad u_0; ..; grad u_n], i.e. F(u, 0).
  BlockVector forward(const BlockVector& u) const {
    check_u(u);
    BlockVector out;
    for (std::size_t j = 1; j <= n_; ++j) out.push_back(multiply(u.field(0), u.field(j)));
    for (std::size_t j = 0; j <= n_; ++j) out.push_back(grad(u.field(j)));
    return out;
  }

  BlockVector eval(const BlockVector& u, const BlockVector& v) const {
    check_v(v);
    return forward(u) - v;
  }

  LinearMap jac_u(const BlockVector& u, const BlockVector& /*v*/) const {
    check_u(u);
    const std::size_t n = n_;
    const BlockVector base = u;
    return LinearMap(
        [base, n](const BlockVector& h) {
          BlockVector y;
          for (std::size_t j = 1; j <= n; ++j) {
            ComplexField t = multiply(h.field(0), base.field(j));
            t += multiply(base.field(0), h.field(j));
            y.push_back(std::move(t));
          }
          for (std::size_t j = 0; j <= n; ++j) y.push_back(grad(h.field(j)));
          return y;
        },
        [base, n](const BlockVector& y) {
          BlockVector x;
          ComplexField acc = grad_adjoint(y.gradient(n));
          for (std::size_t j = 1; j <= n; ++j) acc += multiply_conj(base.field(j), y.field(j - 1));
          x.push_back(std::move(acc));
          for (std::size_t j = 1; j <= n; ++j) {
            ComplexField t = multiply_conj(base.field(0), y.field(j - 1));
            t += grad_adjoint(y.gradient(n + j));
            x.push_back(std::move(t));
          }
          return x;
        },
        u_layout(), v_layout());
  }

  /// Always -I (norm 1), which enables the tau2 = 1/delta elimination.
  LinearMap jac_v(const BlockVector& /*u*/, const BlockVector& v) const {
    check_v(v);
    return LinearMap::scaled_identity(v, -1.0);
  }

  const BlockVector& target() const noexcept { return target_; }

  /// True for every instance: d_v F = -I, so |B^k| = 1 and tau2 may be set to
  /// 1/delta.
  static constexpr bool separable() noexcept { return true; }

 private:
  void check_u(const BlockVector& u) const {
    if (!u.same_layout(u_layout())) throw ShapeError("MriConstraint: u layout mismatch");
  }
  void check_v(const BlockVector& v) const {
    if (!v.same_layout(target_)) throw ShapeError("MriConstraint: v layout mismatch");
  }

  std::size_t n_;
  std::size_t width_;
  std::size_t height_;
  BlockVector target_;
};

inline MriConstraint assemble_constraint(const MriProblem& problem) {
  problem.validate();
  return MriConstraint(problem.coils(), problem.width(), problem.height());
}

/// J(v) = sum_j lambda_j/2 |S F v_j - f_j|^2 + alpha_0 TV(v_n) + sum_j alpha_j |v_{n+j}|_2.
inline SeparableProx assemble_prox_j(const MriProblem& problem) {
  problem.validate();
  std::vector<ProxOp> children;
  const std::size_t n = problem.coils();
  for (std::size_t j = 0; j < n; ++j) {
    children.push_back(ProxOp::fourier_fidelity(problem.lambda[j], problem.mask, problem.data[j]));
  }
  children.push_back(problem.tv_mode == TvMode::isotropic ? ProxOp::group_shrink(problem.alpha0)
                                                          : ProxOp::global_shrink(problem.alpha0));
  for (std::size_t j = 0; j < n; ++j) children.push_back(ProxOp::global_shrink(problem.alpha[j]));
  return SeparableProx(std::move(children));
}

/// H = 0 on all primal blocks.
inline SeparableProx assemble_prox_h(const MriProblem& problem) {
  return SeparableProx::zero(problem.coils() + 1);
}

/// u_j = 1 for all j; v, mu = 0.
inline BlockVector initial_u(const MriConstraint& f) {
  BlockVector u = f.u_layout();
  for (auto& b : u) std::get<ComplexField>(b) = ComplexField(
      std::get<ComplexField>(b).width(), std::get<ComplexField>(b).height(), Complex(1.0));
  return u;
}

}  // namespace padmm::mri
