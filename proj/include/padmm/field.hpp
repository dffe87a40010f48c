#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace padmm {

using Complex = std::complex<double>;

/// Thrown when operands disagree in shape or block layout.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Row-major 2D array of complex samples. Rows run along `height`, columns
/// along `width`; sample (row, col) lives at `row * width + col`.
class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(std::size_t width, std::size_t height, Complex value = {})
      : width_(width), height_(height), data_(width * height, value) {}
  ComplexField(std::size_t width, std::size_t height, std::vector<Complex> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
      throw ShapeError("ComplexField: data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(width_) + "x" +
                       std::to_string(height_));
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * width_ + col];
  }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

  std::span<Complex> samples() noexcept { return data_; }
  std::span<const Complex> samples() const noexcept { return data_; }

  bool same_shape(const ComplexField& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  ComplexField& operator+=(const ComplexField& rhs) {
    check_shape(rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
  }
  ComplexField& operator-=(const ComplexField& rhs) {
    check_shape(rhs);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
  }
  ComplexField& operator*=(Complex s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  /// this += s * x
  ComplexField& axpy(Complex s, const ComplexField& x) {
    check_shape(x);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * x.data_[i];
    return *this;
  }

  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(Complex s, ComplexField a) { return a *= s; }
  friend ComplexField operator*(ComplexField a, Complex s) { return a *= s; }
  friend ComplexField operator-(ComplexField a) { return a *= -1.0; }

  bool operator==(const ComplexField&) const = default;

  void check_shape(const ComplexField& other) const {
    if (!same_shape(other)) {
      throw ShapeError("ComplexField shape mismatch: " + std::to_string(width_) + "x" +
                       std::to_string(height_) + " vs " + std::to_string(other.width_) + "x" +
                       std::to_string(other.height_));
    }
  }

  bool all_finite() const noexcept {
    for (const auto& x : data_) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    }
    return true;
  }

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Complex> data_;
};

/// Per-pixel 2-vector of forward differences: dx along columns, dy along rows.
struct GradientField {
  ComplexField dx;
  ComplexField dy;

  GradientField() = default;
  GradientField(std::size_t width, std::size_t height) : dx(width, height), dy(width, height) {}
  GradientField(ComplexField x, ComplexField y) : dx(std::move(x)), dy(std::move(y)) {
    dx.check_shape(dy);
  }

  std::size_t width() const noexcept { return dx.width(); }
  std::size_t height() const noexcept { return dx.height(); }
  bool same_shape(const GradientField& o) const noexcept { return dx.same_shape(o.dx); }

  GradientField& operator+=(const GradientField& rhs) {
    dx += rhs.dx;
    dy += rhs.dy;
    return *this;
  }
  GradientField& operator-=(const GradientField& rhs) {
    dx -= rhs.dx;
    dy -= rhs.dy;
    return *this;
  }
  GradientField& operator*=(Complex s) {
    dx *= s;
    dy *= s;
    return *this;
  }
  GradientField& axpy(Complex s, const GradientField& x) {
    dx.axpy(s, x.dx);
    dy.axpy(s, x.dy);
    return *this;
  }

  friend GradientField operator+(GradientField a, const GradientField& b) { return a += b; }
  friend GradientField operator-(GradientField a, const GradientField& b) { return a -= b; }
  friend GradientField operator*(Complex s, GradientField a) { return a *= s; }
  friend GradientField operator*(GradientField a, Complex s) { return a *= s; }
  friend GradientField operator-(GradientField a) { return a *= -1.0; }

  bool operator==(const GradientField&) const = default;

  bool all_finite() const noexcept { return dx.all_finite() && dy.all_finite(); }
};

// Inner products conjugate the second argument: <a, b> = sum a_i * conj(b_i).
// Real-valued pairings (Lagrangian terms, monotonicity checks) use Re<a, b>.

inline Complex inner(const ComplexField& a, const ComplexField& b) {
  a.check_shape(b);
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc;
}

inline Complex inner(const GradientField& a, const GradientField& b) {
  return inner(a.dx, b.dx) + inner(a.dy, b.dy);
}

inline double squared_norm(const ComplexField& a) {
  double acc = 0.0;
  for (const auto& x : a.samples()) acc += std::norm(x);
  return acc;
}

inline double squared_norm(const GradientField& g) {
  return squared_norm(g.dx) + squared_norm(g.dy);
}

inline double norm2(const ComplexField& a) { return std::sqrt(squared_norm(a)); }
inline double norm2(const GradientField& g) { return std::sqrt(squared_norm(g)); }

inline double max_abs(const ComplexField& a) {
  double m = 0.0;
  for (const auto& x : a.samples()) m = std::max(m, std::abs(x));
  return m;
}

/// Pointwise product.
inline ComplexField multiply(const ComplexField& a, const ComplexField& b) {
  a.check_shape(b);
  ComplexField out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

/// Pointwise conj(a) * b.
inline ComplexField multiply_conj(const ComplexField& a, const ComplexField& b) {
  a.check_shape(b);
  ComplexField out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::conj(a[i]) * b[i];
  return out;
}

inline ComplexField modulus(const ComplexField& a) {
  ComplexField out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::abs(a[i]);
  return out;
}

/// Forward differences with Neumann boundary: the last column of dx and the
/// last row of dy are zero.
inline GradientField grad(const ComplexField& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  GradientField g(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c + 1 < w; ++c) g.dx(r, c) = img(r, c + 1) - img(r, c);
  }
  for (std::size_t r = 0; r + 1 < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) g.dy(r, c) = img(r + 1, c) - img(r, c);
  }
  return g;
}

/// Exact adjoint of grad (the negative divergence).
inline ComplexField grad_adjoint(const GradientField& g) {
  const std::size_t w = g.width();
  const std::size_t h = g.height();
  ComplexField out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      Complex acc{};
      if (c + 1 < w) acc -= g.dx(r, c);
      if (c >= 1) acc += g.dx(r, c - 1);
      if (r + 1 < h) acc -= g.dy(r, c);
      if (r >= 1) acc += g.dy(r - 1, c);
      out(r, c) = acc;
    }
  }
  return out;
}

}  // namespace padmm
