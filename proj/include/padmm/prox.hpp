#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <variant>
#include <vector>

#include "padmm/block_vector.hpp"
#include "padmm/fft.hpp"

namespace padmm {

// Resolvents (I + tau dE)^{-1}(w) = argmin_x 1/2 |x - w|^2 + tau E(x).

inline void check_nonnegative(double value, const char* what) {
  if (!(value >= 0.0)) throw std::invalid_argument(std::string(what) + " must be >= 0");
}

inline void check_binary_mask(const ComplexField& mask) {
  for (const auto& m : mask.samples()) {
    if (m != Complex(0.0) && m != Complex(1.0)) {
      throw std::invalid_argument("sampling mask entries must be 0 or 1");
    }
  }
}

/// E = 0.
template <class T>
T prox_identity(const T& w, double /*tau*/) {
  return w;
}

/// E(x) = weight/2 |x - anchor|^2.
template <class T>
T prox_squared_distance(const T& w, double tau, double weight, const T& anchor) {
  T out = w;
  out.axpy(tau * weight, anchor);
  out *= 1.0 / (1.0 + tau * weight);
  return out;
}

/// E(x) = lambda/2 |S F x - f|^2 with S a binary k-space mask and `data` the
/// zero-filled embedding S^T f. Diagonal in Fourier space:
/// x = F^{-1}((F w + tau lambda S^T f) / (1 + tau lambda S)).
inline ComplexField prox_l2_fourier(const ComplexField& w, double tau, double lambda,
                                    const ComplexField& mask, const ComplexField& data) {
  w.check_shape(mask);
  w.check_shape(data);
  check_nonnegative(lambda, "lambda");
  const double tl = tau * lambda;
  ComplexField k = dft2(w);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double s = mask[i].real();
    k[i] = (k[i] + tl * s * data[i]) / (1.0 + tl * s);
  }
  return idft2(std::move(k));
}

inline double l2_fourier_value(const ComplexField& x, double lambda, const ComplexField& mask,
                               const ComplexField& data) {
  const ComplexField k = dft2(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    acc += std::norm(mask[i].real() * k[i] - mask[i].real() * data[i]);
  }
  return 0.5 * lambda * acc;
}

/// E(g) = alpha * sum_pixels |(dx, dy)|_2 (isotropic TV of a gradient field).
/// Per-pixel group soft-thresholding; pixels with magnitude <= alpha*tau vanish.
inline GradientField prox_group_shrink(const GradientField& g, double tau, double alpha) {
  check_nonnegative(alpha, "alpha");
  const double t = alpha * tau;
  GradientField out = g;
  for (std::size_t i = 0; i < g.dx.size(); ++i) {
    const double mag = std::sqrt(std::norm(g.dx[i]) + std::norm(g.dy[i]));
    const double scale = mag > t ? 1.0 - t / mag : 0.0;
    out.dx[i] *= scale;
    out.dy[i] *= scale;
  }
  return out;
}

inline double group_norm(const GradientField& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.dx.size(); ++i) {
    acc += std::sqrt(std::norm(g.dx[i]) + std::norm(g.dy[i]));
  }
  return acc;
}

/// E(g) = alpha * |g|_2 over all pixels and both components: one global shrink.
inline GradientField prox_global_shrink(const GradientField& g, double tau, double alpha) {
  check_nonnegative(alpha, "alpha");
  const double t = alpha * tau;
  const double r = norm2(g);
  GradientField out = g;
  out *= r > t ? 1.0 - t / r : 0.0;
  return out;
}

struct IdentityProx {};
struct SquaredDistanceProx {
  double weight = 1.0;
  Block anchor;
};
struct FourierFidelityProx {
  double lambda = 0.0;
  ComplexField mask;
  ComplexField data;
};
struct GroupShrinkProx {
  double alpha = 0.0;
};
struct GlobalShrinkProx {
  double alpha = 0.0;
};

/// Resolvent of one convex term acting on a single block.
class ProxOp {
 public:
  using Kind = std::variant<IdentityProx, SquaredDistanceProx, FourierFidelityProx,
                            GroupShrinkProx, GlobalShrinkProx>;

  ProxOp() = default;
  ProxOp(Kind kind) : kind_(std::move(kind)) { validate(); }  // NOLINT(google-explicit-constructor)

  static ProxOp identity() { return ProxOp(IdentityProx{}); }
  static ProxOp squared_distance(double weight, Block anchor) {
    return ProxOp(SquaredDistanceProx{weight, std::move(anchor)});
  }
  static ProxOp fourier_fidelity(double lambda, ComplexField mask, ComplexField data) {
    return ProxOp(FourierFidelityProx{lambda, std::move(mask), std::move(data)});
  }
  static ProxOp group_shrink(double alpha) { return ProxOp(GroupShrinkProx{alpha}); }
  static ProxOp global_shrink(double alpha) { return ProxOp(GlobalShrinkProx{alpha}); }

  const Kind& kind() const noexcept { return kind_; }

  Block operator()(const Block& w, double tau) const {
    if (!(tau >= 0.0)) throw std::invalid_argument("prox step must be >= 0");
    return std::visit(
        [&](const auto& k) -> Block {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, IdentityProx>) {
            return w;
          } else if constexpr (std::is_same_v<K, SquaredDistanceProx>) {
            return std::visit(
                [&](const auto& x) -> Block {
                  using T = std::decay_t<decltype(x)>;
                  return prox_squared_distance(x, tau, k.weight, std::get<T>(k.anchor));
                },
                w);
          } else if constexpr (std::is_same_v<K, FourierFidelityProx>) {
            return prox_l2_fourier(as<ComplexField>(w), tau, k.lambda, k.mask, k.data);
          } else if constexpr (std::is_same_v<K, GroupShrinkProx>) {
            return prox_group_shrink(as<GradientField>(w), tau, k.alpha);
          } else {
            return prox_global_shrink(as<GradientField>(w), tau, k.alpha);
          }
        },
        kind_);
  }

  /// Value of the underlying term E at x.
  double value(const Block& x) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, IdentityProx>) {
            return 0.0;
          } else if constexpr (std::is_same_v<K, SquaredDistanceProx>) {
            return std::visit(
                [&](const auto& a) {
                  using T = std::decay_t<decltype(a)>;
                  return 0.5 * k.weight * squared_norm(a - std::get<T>(k.anchor));
                },
                x);
          } else if constexpr (std::is_same_v<K, FourierFidelityProx>) {
            return l2_fourier_value(as<ComplexField>(x), k.lambda, k.mask, k.data);
          } else if constexpr (std::is_same_v<K, GroupShrinkProx>) {
            return k.alpha * group_norm(as<GradientField>(x));
          } else {
            return k.alpha * norm2(as<GradientField>(x));
          }
        },
        kind_);
  }

 private:
  template <class T>
  static const T& as(const Block& b) {
    if (!std::holds_alternative<T>(b)) throw ShapeError("prox applied to the wrong block kind");
    return std::get<T>(b);
  }

  void validate() const {
    std::visit(
        [](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SquaredDistanceProx>) {
            check_nonnegative(k.weight, "weight");
          } else if constexpr (std::is_same_v<K, FourierFidelityProx>) {
            check_nonnegative(k.lambda, "lambda");
            k.mask.check_shape(k.data);
            check_binary_mask(k.mask);
          } else if constexpr (std::is_same_v<K, GroupShrinkProx> ||
                               std::is_same_v<K, GlobalShrinkProx>) {
            check_nonnegative(k.alpha, "alpha");
          }
        },
        kind_);
  }

  Kind kind_ = IdentityProx{};
};

/// Resolvent of a separable sum E(x) = sum_i E_i(x_i); child i acts on block i.
class SeparableProx {
 public:
  SeparableProx() = default;
  explicit SeparableProx(std::vector<ProxOp> children) : children_(std::move(children)) {}

  /// Separable sum of zero functions over `n` blocks.
  static SeparableProx zero(std::size_t n) {
    return SeparableProx(std::vector<ProxOp>(n, ProxOp::identity()));
  }

  const std::vector<ProxOp>& children() const noexcept { return children_; }
  std::size_t size() const noexcept { return children_.size(); }

  BlockVector operator()(const BlockVector& w, double tau) const {
    check(w);
    BlockVector out;
    for (std::size_t i = 0; i < children_.size(); ++i) out.push_back(children_[i](w[i], tau));
    return out;
  }

  double value(const BlockVector& x) const {
    check(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < children_.size(); ++i) acc += children_[i].value(x[i]);
    return acc;
  }

 private:
  void check(const BlockVector& w) const {
    if (w.size() != children_.size()) {
      throw ShapeError("separable prox: " + std::to_string(children_.size()) +
                       " children for " + std::to_string(w.size()) + " blocks");
    }
  }

  std::vector<ProxOp> children_;
};

/// Anything usable as a resolvent on block vectors.
template <class P>
concept BlockProx = requires(const P& p, const BlockVector& w, double tau) {
  { p(w, tau) } -> std::convertible_to<BlockVector>;
};

/// Resolvent of the convex conjugate via Moreau's identity:
/// (I + delta dJ*)^{-1}(delta b) = delta (b - (I + (1/delta) dJ)^{-1}(b)).
/// Takes b and returns the conjugate resolvent evaluated at delta*b.
template <BlockProx P>
BlockVector prox_conjugate(const P& prox_j, const BlockVector& b, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("prox_conjugate: delta must be > 0");
  BlockVector out = b - prox_j(b, 1.0 / delta);
  out *= delta;
  return out;
}

}  // namespace padmm
