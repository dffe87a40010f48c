#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "padmm/fft.hpp"
#include "padmm/field.hpp"
#include "padmm/tissues.hpp"

namespace padmm::phantom {

/// FLAIR signal rho (1 - 2 e^{-TI/T1}) (1 - e^{-TR/T1}) e^{-TE/T2}.
inline double flair_signal(double rho, double t1, double t2, double tr, double te, double ti) {
  if (!(t1 > 0 && t2 > 0 && tr > 0 && te > 0 && ti > 0)) {
    throw std::invalid_argument("flair_signal: times must be positive");
  }
  return rho * (1.0 - 2.0 * std::exp(-ti / t1)) * (1.0 - std::exp(-tr / t1)) * std::exp(-te / t2);
}

inline double flair_signal(const TissueParams& t, const SequenceParams& s) {
  if (t.rho == 0.0) return 0.0;
  return flair_signal(t.rho, t.t1, t.t2, s.tr, s.te, s.ti);
}

/// Ellipse in normalized coordinates: the grid spans [-1, 1] on both axes,
/// x along columns, y along rows (downwards).
struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double a = 1.0;  // semi-axis along x before rotation
  double b = 1.0;
  double angle_deg = 0.0;
  Tissue tissue = Tissue::background;

  bool contains(double x, double y) const {
    const double th = angle_deg * std::numbers::pi / 180.0;
    const double dx = x - cx;
    const double dy = y - cy;
    const double xr = dx * std::cos(th) + dy * std::sin(th);
    const double yr = -dx * std::sin(th) + dy * std::cos(th);
    return (xr * xr) / (a * a) + (yr * yr) / (b * b) <= 1.0;
  }
};

struct PhantomSpec {
  std::size_t width = 190;
  std::size_t height = 190;
  std::vector<Ellipse> regions;  // painted in order; later regions win
};

/// Axial brain slice built from ellipses: skull, subarachnoid CSF, cortex,
/// white matter, lateral ventricles and deep gray nuclei.
inline PhantomSpec brain_phantom(std::size_t size = 190) {
  PhantomSpec spec;
  spec.width = size;
  spec.height = size;
  spec.regions = {
      {0.0, 0.0, 0.78, 0.94, 0.0, Tissue::cortical_bone},
      {0.0, 0.0, 0.72, 0.88, 0.0, Tissue::csf},
      {0.0, 0.01, 0.68, 0.84, 0.0, Tissue::gray_matter},
      {0.0, 0.02, 0.56, 0.71, 0.0, Tissue::white_matter},
      // cortical folds reaching into the white matter
      {0.0, -0.62, 0.05, 0.16, 0.0, Tissue::gray_matter},
      {0.42, -0.35, 0.05, 0.17, -40.0, Tissue::gray_matter},
      {-0.42, -0.35, 0.05, 0.17, 40.0, Tissue::gray_matter},
      {0.5, 0.2, 0.16, 0.05, 10.0, Tissue::gray_matter},
      {-0.5, 0.2, 0.16, 0.05, -10.0, Tissue::gray_matter},
      {0.0, 0.66, 0.05, 0.14, 0.0, Tissue::gray_matter},
      // deep gray nuclei
      {0.24, 0.08, 0.09, 0.15, -15.0, Tissue::gray_matter},
      {-0.24, 0.08, 0.09, 0.15, 15.0, Tissue::gray_matter},
      // lateral ventricles and third ventricle
      {0.11, -0.08, 0.07, 0.26, 18.0, Tissue::csf},
      {-0.11, -0.08, 0.07, 0.26, -18.0, Tissue::csf},
      {0.0, 0.2, 0.025, 0.09, 0.0, Tissue::csf},
  };
  return spec;
}

/// Rasterizes the tissue labels (pixel centers are tested against each region).
inline std::vector<Tissue> rasterize(const PhantomSpec& spec) {
  std::vector<Tissue> labels(spec.width * spec.height, Tissue::background);
  for (std::size_t r = 0; r < spec.height; ++r) {
    const double y = 2.0 * (static_cast<double>(r) + 0.5) / static_cast<double>(spec.height) - 1.0;
    for (std::size_t c = 0; c < spec.width; ++c) {
      const double x = 2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(spec.width) - 1.0;
      for (const auto& e : spec.regions) {
        if (e.contains(x, y)) labels[r * spec.width + c] = e.tissue;
      }
    }
  }
  return labels;
}

/// Real-valued FLAIR image, normalized to unit maximum modulus (an image
/// without signal stays zero).
inline ComplexField build_phantom(const PhantomSpec& spec, const SequenceParams& seq = {}) {
  const auto labels = rasterize(spec);
  ComplexField img(spec.width, spec.height);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    img[i] = flair_signal(tissue_params(labels[i]), seq);
  }
  const double peak = max_abs(img);
  if (peak > 0.0) img *= 1.0 / peak;
  return img;
}

struct CoilSpec {
  std::size_t count = 8;
  std::uint64_t seed = 7;
  double ring_radius = 0.45;  // coil centers, fraction of the grid size
  double width = 1.0;         // Gaussian profile std, fraction of the grid size
  double phase_slope = 0.5;   // radians across the field of view
};

/// Smooth synthetic coil sensitivities: Gaussian magnitude centred on a ring
/// around the field of view (a single coil sits at the centre) with a slow
/// linear phase ramp and a seeded constant phase offset per coil. Maps are
/// scaled so that the root-mean-square over coils and pixels is 1.
inline std::vector<ComplexField> make_coil_maps(const CoilSpec& spec, std::size_t width,
                                                std::size_t height) {
  if (spec.count == 0) throw std::invalid_argument("make_coil_maps: need at least one coil");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double size = static_cast<double>(std::min(width, height));
  const double sx = 0.5 * static_cast<double>(width);
  const double sy = 0.5 * static_cast<double>(height);
  const double radius = spec.count == 1 ? 0.0 : spec.ring_radius * size;
  const double sigma = spec.width * size;

  std::vector<ComplexField> maps;
  for (std::size_t j = 0; j < spec.count; ++j) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(spec.count);
    const double cx = sx + radius * std::cos(ang);
    const double cy = sy + radius * std::sin(ang);
    const double offset = phase(rng);
    ComplexField m(width, height);
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        const double x = static_cast<double>(c) + 0.5;
        const double y = static_cast<double>(r) + 0.5;
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double mag = std::exp(-d2 / (2.0 * sigma * sigma));
        const double ph = offset + spec.phase_slope *
                                       ((x - sx) * std::cos(ang) + (y - sy) * std::sin(ang)) / size;
        m(r, c) = std::polar(mag, ph);
      }
    }
    maps.push_back(std::move(m));
  }
  double energy = 0.0;
  for (const auto& m : maps) energy += squared_norm(m);
  const double scale = std::sqrt(static_cast<double>(spec.count * width * height) / energy);
  for (auto& m : maps) m *= scale;
  return maps;
}

struct SamplingSpec {
  double fraction = 0.25;
  double turns = 12.0;
  double tolerance = 0.02;  // accepted |achieved - target| fraction
  double sigma = 0.05;      // noise std per real/imaginary component
  std::uint64_t seed = 1;
};

struct SpiralMask {
  ComplexField mask;
  double thickness = 0.0;  // line thickness in k-space pixels
  double fraction = 0.0;   // achieved sampled fraction
};

namespace detail {

// Signed frequency index of DFT bin k out of n (DC at 0).
inline double frequency(std::size_t k, std::size_t n) {
  return k < (n + 1) / 2 ? static_cast<double>(k)
                         : static_cast<double>(k) - static_cast<double>(n);
}

inline ComplexField rasterize_spiral(std::size_t w, std::size_t h, double turns, double thickness,
                                     std::size_t& count) {
  const double r_max = std::hypot(0.5 * static_cast<double>(w), 0.5 * static_cast<double>(h));
  const double pitch = r_max / (2.0 * std::numbers::pi * turns);  // r = pitch * angle
  const double half = 0.5 * thickness;
  ComplexField mask(w, h);
  count = 0;
  for (std::size_t r = 0; r < h; ++r) {
    const double fy = frequency(r, h);
    for (std::size_t c = 0; c < w; ++c) {
      const double fx = frequency(c, w);
      const double rad = std::hypot(fx, fy);
      double phi = std::atan2(fy, fx);
      if (phi < 0.0) phi += 2.0 * std::numbers::pi;
      bool hit = rad <= std::max(half, 0.5);  // DC always sampled
      // Distance to the nearest arm along the ray at angle phi.
      const double m = std::round((rad / pitch - phi) / (2.0 * std::numbers::pi));
      for (double mm = std::max(0.0, m - 1.0); !hit && mm <= m + 1.0; mm += 1.0) {
        const double arm = pitch * (phi + 2.0 * std::numbers::pi * mm);
        if (std::abs(rad - arm) <= half) hit = true;
      }
      if (hit) {
        mask(r, c) = 1.0;
        ++count;
      }
    }
  }
  return mask;
}

}  // namespace detail

/// One-armed Archimedean spiral from the k-space centre outwards, in unshifted
/// DFT layout. Line thickness is found by bisection so the sampled fraction hits
/// spec.fraction; throws if the achieved fraction misses by more than
/// spec.tolerance.
inline SpiralMask spiral_mask(const SamplingSpec& spec, std::size_t width, std::size_t height) {
  if (!(spec.fraction > 0.0 && spec.fraction <= 1.0)) {
    throw std::invalid_argument("spiral_mask: fraction must lie in (0, 1]");
  }
  if (!(spec.turns > 0.0)) throw std::invalid_argument("spiral_mask: turns must be > 0");
  const double total = static_cast<double>(width * height);
  if (spec.fraction >= 1.0) return {ComplexField(width, height, Complex(1.0)), 0.0, 1.0};

  const double r_max = std::hypot(0.5 * static_cast<double>(width), 0.5 * static_cast<double>(height));
  double lo = 0.0;
  double hi = 2.0 * r_max / spec.turns;  // arm spacing: full coverage
  SpiralMask best;
  double best_err = 2.0;
  for (int it = 0; it < 60; ++it) {
    const double t = 0.5 * (lo + hi);
    std::size_t count = 0;
    auto m = detail::rasterize_spiral(width, height, spec.turns, t, count);
    const double frac = static_cast<double>(count) / total;
    const double err = std::abs(frac - spec.fraction);
    if (err < best_err) {
      best_err = err;
      best = {std::move(m), t, frac};
    }
    if (frac < spec.fraction) {
      lo = t;
    } else {
      hi = t;
    }
  }
  if (best_err > spec.tolerance) {
    throw std::runtime_error("spiral_mask: achieved fraction " + std::to_string(best.fraction) +
                             " misses target " + std::to_string(spec.fraction));
  }
  return best;
}

inline double sampled_fraction(const ComplexField& mask) {
  double n = 0.0;
  for (const auto& m : mask.samples()) n += m.real();
  return n / static_cast<double>(mask.size());
}

/// f_j = S (dft2(phantom * c_j) + noise_j); noise is complex with independent
/// N(0, sigma^2) real and imaginary parts, drawn for sampled bins only, coil by
/// coil in row-major order. Off-mask bins are exactly zero.
inline std::vector<ComplexField> simulate_kspace(const ComplexField& phantom,
                                                 const std::vector<ComplexField>& coils,
                                                 const ComplexField& mask, double sigma,
                                                 std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("simulate_kspace: sigma must be >= 0");
  phantom.check_shape(mask);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ComplexField> out;
  out.reserve(coils.size());
  for (const auto& c : coils) {
    ComplexField k = dft2(multiply(phantom, c));
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (mask[i] == Complex(0.0)) {
        k[i] = 0.0;
        continue;
      }
      if (sigma > 0.0) {
        const double re = normal(rng);
        const double im = normal(rng);
        k[i] += sigma * Complex(re, im);
      }
    }
    out.push_back(std::move(k));
  }
  return out;
}

}  // namespace padmm::phantom
