#pragma once

#include <initializer_list>
#include <variant>
#include <vector>

#include "padmm/field.hpp"

namespace padmm {

using Block = std::variant<ComplexField, GradientField>;

/// Ordered stack of image and gradient blocks. Arithmetic is blockwise and
/// requires both operands to share the same block kinds and shapes.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(std::initializer_list<Block> blocks) : blocks_(blocks) {}
  explicit BlockVector(std::vector<Block> blocks) : blocks_(std::move(blocks)) {}

  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }

  Block& operator[](std::size_t i) { return blocks_[i]; }
  const Block& operator[](std::size_t i) const { return blocks_[i]; }

  ComplexField& field(std::size_t i) { return std::get<ComplexField>(blocks_[i]); }
  const ComplexField& field(std::size_t i) const { return std::get<ComplexField>(blocks_[i]); }
  GradientField& gradient(std::size_t i) { return std::get<GradientField>(blocks_[i]); }
  const GradientField& gradient(std::size_t i) const {
    return std::get<GradientField>(blocks_[i]);
  }

  void push_back(Block b) { blocks_.push_back(std::move(b)); }

  auto begin() noexcept { return blocks_.begin(); }
  auto end() noexcept { return blocks_.end(); }
  auto begin() const noexcept { return blocks_.begin(); }
  auto end() const noexcept { return blocks_.end(); }

  /// Zero vector with the same layout.
  BlockVector zeros_like() const {
    BlockVector out;
    out.blocks_.reserve(blocks_.size());
    for (const auto& b : blocks_) {
      out.blocks_.push_back(std::visit(
          [](const auto& x) -> Block {
            using T = std::decay_t<decltype(x)>;
            return T(x.width(), x.height());
          },
          b));
    }
    return out;
  }

  bool same_layout(const BlockVector& other) const noexcept {
    if (blocks_.size() != other.blocks_.size()) return false;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].index() != other.blocks_[i].index()) return false;
      const bool same = std::visit(
          [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            return a.same_shape(std::get<T>(other.blocks_[i]));
          },
          blocks_[i]);
      if (!same) return false;
    }
    return true;
  }

  void check_layout(const BlockVector& other) const {
    if (!same_layout(other)) throw ShapeError("BlockVector layout mismatch");
  }

  /// this += s * x
  BlockVector& axpy(Complex s, const BlockVector& x) {
    check_layout(x);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      std::visit(
          [&](auto& a) {
            using T = std::decay_t<decltype(a)>;
            a.axpy(s, std::get<T>(x.blocks_[i]));
          },
          blocks_[i]);
    }
    return *this;
  }

  BlockVector& operator+=(const BlockVector& rhs) { return axpy(1.0, rhs); }
  BlockVector& operator-=(const BlockVector& rhs) { return axpy(-1.0, rhs); }
  BlockVector& operator*=(Complex s) {
    for (auto& b : blocks_) std::visit([&](auto& a) { a *= s; }, b);
    return *this;
  }

  friend BlockVector operator+(BlockVector a, const BlockVector& b) { return a += b; }
  friend BlockVector operator-(BlockVector a, const BlockVector& b) { return a -= b; }
  friend BlockVector operator*(Complex s, BlockVector a) { return a *= s; }
  friend BlockVector operator*(BlockVector a, Complex s) { return a *= s; }
  friend BlockVector operator-(BlockVector a) { return a *= -1.0; }

  bool operator==(const BlockVector&) const = default;

  bool all_finite() const noexcept {
    for (const auto& b : blocks_) {
      if (!std::visit([](const auto& a) { return a.all_finite(); }, b)) return false;
    }
    return true;
  }

  /// Total number of complex samples over all blocks.
  std::size_t sample_count() const noexcept {
    std::size_t n = 0;
    for (const auto& b : blocks_) {
      n += std::visit(
          [](const auto& a) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(a)>, GradientField>)
              return 2 * a.dx.size();
            else
              return a.size();
          },
          b);
    }
    return n;
  }

  /// Visits every complex sample in block order (dx before dy for gradients).
  template <class Fn>
  void for_each_sample(Fn&& fn) {
    for (auto& b : blocks_) {
      std::visit(
          [&](auto& a) {
            if constexpr (std::is_same_v<std::decay_t<decltype(a)>, GradientField>) {
              for (auto& x : a.dx.samples()) fn(x);
              for (auto& x : a.dy.samples()) fn(x);
            } else {
              for (auto& x : a.samples()) fn(x);
            }
          },
          b);
    }
  }
  template <class Fn>
  void for_each_sample(Fn&& fn) const {
    const_cast<BlockVector*>(this)->for_each_sample(
        [&](Complex& x) { fn(static_cast<const Complex&>(x)); });
  }

 private:
  std::vector<Block> blocks_;
};

inline Complex inner(const BlockVector& a, const BlockVector& b) {
  a.check_layout(b);
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          return inner(x, std::get<T>(b[i]));
        },
        a[i]);
  }
  return acc;
}

inline double squared_norm(const BlockVector& a) {
  double acc = 0.0;
  for (const auto& b : a) acc += std::visit([](const auto& x) { return squared_norm(x); }, b);
  return acc;
}

inline double norm2(const BlockVector& a) { return std::sqrt(squared_norm(a)); }

/// Single-block vector wrapping a field.
inline BlockVector single(ComplexField f) { return BlockVector{Block(std::move(f))}; }

/// Column vector (width 1) holding the given values; handy for small dense problems.
inline ComplexField column(std::vector<Complex> values) {
  const auto n = values.size();
  return ComplexField(1, n, std::move(values));
}

}  // namespace padmm
