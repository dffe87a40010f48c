#pragma once

#include <array>
#include <string_view>

namespace padmm::phantom {

enum class Tissue { background, csf, gray_matter, white_matter, cortical_bone };

struct TissueParams {
  double rho = 0.0;  // spin density, arbitrary units
  double t1 = 1.0;   // ms
  double t2 = 1.0;   // ms
};

struct SequenceParams {
  double tr = 10000.0;  // ms
  double te = 90.0;     // ms
  double ti = 1781.0;   // ms, nulls CSF: T1_csf * ln 2
};

// Frozen tissue table. T1 of CSF (2569 ms) is the value used to derive the
// inversion time; the remaining entries are approximate 1.5 T literature
// values as tabulated for the BrainWeb digital brain phantoms. The repo treats
// this table as ground truth; tests depend on relative contrast only.
inline constexpr TissueParams tissue_params(Tissue t) {
  switch (t) {
    case Tissue::background:
      return {0.0, 1.0, 1.0};
    case Tissue::csf:
      return {1.0, 2569.0, 329.0};
    case Tissue::gray_matter:
      return {0.86, 833.0, 83.0};
    case Tissue::white_matter:
      return {0.77, 500.0, 70.0};
    case Tissue::cortical_bone:
      return {0.12, 750.0, 50.0};
  }
  return {};
}

inline constexpr std::string_view tissue_name(Tissue t) {
  switch (t) {
    case Tissue::background:
      return "background";
    case Tissue::csf:
      return "csf";
    case Tissue::gray_matter:
      return "gray_matter";
    case Tissue::white_matter:
      return "white_matter";
    case Tissue::cortical_bone:
      return "cortical_bone";
  }
  return "unknown";
}

}  // namespace padmm::phantom
