#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "padmm/block_vector.hpp"
#include "padmm/constraint.hpp"
#include "padmm/fft.hpp"
#include "padmm/linear_map.hpp"

namespace padmm::test {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline ComplexField random_field(std::size_t w, std::size_t h, std::uint64_t seed) {
  return random_like(single(ComplexField(w, h)), seed).field(0);
}

inline GradientField random_gradient(std::size_t w, std::size_t h, std::uint64_t seed) {
  BlockVector layout;
  layout.push_back(GradientField(w, h));
  return random_like(layout, seed).gradient(0);
}

inline Vec to_eigen(const BlockVector& x) {
  const auto flat = flatten(x);
  Vec out(static_cast<Eigen::Index>(flat.size()));
  for (std::size_t i = 0; i < flat.size(); ++i) out(static_cast<Eigen::Index>(i)) = flat[i];
  return out;
}

inline BlockVector from_eigen(const BlockVector& layout, const Vec& x) {
  std::vector<Complex> flat(static_cast<std::size_t>(x.size()));
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = x(static_cast<Eigen::Index>(i));
  return unflatten(layout, flat);
}

/// Dense matrix of any map by applying it to unit vectors.
inline Mat dense(const LinearMap& map) {
  const auto n = static_cast<Eigen::Index>(map.domain().sample_count());
  const auto rows = static_cast<Eigen::Index>(map.range().sample_count());
  Mat m(rows, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = 1.0;
    m.col(j) = to_eigen(map.apply(from_eigen(map.domain(), e)));
  }
  return m;
}

/// Unitary 2-D DFT as an explicit (w*h)x(w*h) matrix on row-major samples,
/// e^{-2 pi i (kr r / h + kc c / w)} / sqrt(w h).
inline Mat dft_matrix(std::size_t w, std::size_t h) {
  const auto n = static_cast<Eigen::Index>(w * h);
  Mat f(n, n);
  const double pi = std::acos(-1.0);
  for (std::size_t kr = 0; kr < h; ++kr) {
    for (std::size_t kc = 0; kc < w; ++kc) {
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          const double ph = -2.0 * pi *
                            (static_cast<double>(kr * r) / static_cast<double>(h) +
                             static_cast<double>(kc * c) / static_cast<double>(w));
          f(static_cast<Eigen::Index>(kr * w + kc), static_cast<Eigen::Index>(r * w + c)) =
              std::polar(1.0 / std::sqrt(static_cast<double>(w * h)), ph);
        }
      }
    }
  }
  return f;
}

inline BlockVector random_direction(const BlockVector& layout, std::uint64_t seed, double scale = 1.0) {
  BlockVector d = random_like(layout, seed);
  return (scale / norm2(d)) * d;
}

}  // namespace padmm::test
