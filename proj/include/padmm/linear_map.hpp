#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>

#include "padmm/block_vector.hpp"

namespace padmm {

/// Matrix-free linear map between block vectors, given as an apply/adjoint
/// pair. `domain()` and `range()` are zero vectors describing the layouts.
/// A map may carry its exact operator norm (e.g. +-identity), in which case
/// norm estimation is skipped.
class LinearMap {
 public:
  using Fn = std::function<BlockVector(const BlockVector&)>;

  LinearMap(Fn apply, Fn adjoint, BlockVector domain, BlockVector range,
            std::optional<double> exact_norm = std::nullopt)
      : apply_(std::move(apply)),
        adjoint_(std::move(adjoint)),
        domain_(std::move(domain)),
        range_(std::move(range)),
        exact_norm_(exact_norm) {}

  static LinearMap scaled_identity(const BlockVector& layout, double scale) {
    auto zero = layout.zeros_like();
    return LinearMap([scale](const BlockVector& x) { return scale * x; },
                     [scale](const BlockVector& y) { return scale * y; }, zero, zero,
                     std::abs(scale));
  }

  BlockVector apply(const BlockVector& x) const { return apply_(x); }
  BlockVector adjoint(const BlockVector& y) const { return adjoint_(y); }

  const BlockVector& domain() const noexcept { return domain_; }
  const BlockVector& range() const noexcept { return range_; }
  const std::optional<double>& exact_norm() const noexcept { return exact_norm_; }

 private:
  Fn apply_;
  Fn adjoint_;
  BlockVector domain_;
  BlockVector range_;
  std::optional<double> exact_norm_;
};

/// Fills every sample with independent standard normal real and imaginary parts.
inline void fill_gaussian(BlockVector& x, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  x.for_each_sample([&](Complex& s) {
    const double re = normal(rng);
    const double im = normal(rng);
    s = Complex(re, im);
  });
}

inline BlockVector random_like(const BlockVector& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto x = layout.zeros_like();
  fill_gaussian(x, rng);
  return x;
}

struct OpNormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
  /// Final unit-norm iterate; feed it back as a warm start.
  BlockVector vector;
};

struct PowerIterationOptions {
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
};

/// Largest singular value of `map` via power iteration on A*A.
///
/// Starts from `warm_start` when given (and nonzero), otherwise from a seeded
/// Gaussian vector. Stops once the relative change of the estimate drops to
/// `tol`; `converged` is false if max_iter was hit with a change above 10*tol.
/// Maps carrying an exact norm return it immediately.
inline OpNormEstimate estimate_opnorm(const LinearMap& map, const PowerIterationOptions& opts,
                                      const BlockVector* warm_start = nullptr) {
  OpNormEstimate est;
  if (map.exact_norm()) {
    est.value = *map.exact_norm();
    return est;
  }
  BlockVector x = (warm_start && warm_start->same_layout(map.domain()) && norm2(*warm_start) > 0)
                      ? *warm_start
                      : random_like(map.domain(), opts.seed);
  x *= 1.0 / norm2(x);

  double sigma = norm2(map.apply(x));
  double change = 1.0;
  int it = 0;
  while (it < opts.max_iter) {
    ++it;
    BlockVector y = map.adjoint(map.apply(x));
    const double ny = norm2(y);
    if (ny == 0.0) {
      sigma = 0.0;
      change = 0.0;
      break;
    }
    x = std::move(y);
    x *= 1.0 / ny;
    const double next = norm2(map.apply(x));
    change = std::abs(next - sigma) / std::max(next, 1e-300);
    sigma = next;
    if (change <= opts.tol) break;
  }
  est.value = sigma;
  est.iterations = it;
  est.converged = change <= 10.0 * opts.tol;
  est.vector = std::move(x);
  return est;
}

/// Relative mismatch |<Ax, y> - <x, A*y>| of an apply/adjoint pair.
inline double adjoint_mismatch(const LinearMap& map, const BlockVector& x, const BlockVector& y) {
  const BlockVector ax = map.apply(x);
  const BlockVector aty = map.adjoint(y);
  const Complex lhs = inner(ax, y);
  const Complex rhs = inner(x, aty);
  const double scale = std::max(norm2(ax) * norm2(y), norm2(x) * norm2(aty));
  return scale == 0.0 ? std::abs(lhs - rhs) : std::abs(lhs - rhs) / scale;
}

}  // namespace padmm
