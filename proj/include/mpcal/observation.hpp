#pragma once

#include <array>
#include <stdexcept>

#include "mpcal/model.hpp"
#include "mpcal/tensor.hpp"

namespace mpcal {

/// Target stress for one load step plus the component mask selecting which
/// Voigt slots enter the misfit.
struct Observation {
  SymTensor<double> target{};
  std::array<bool, 6> mask{true, true, true, true, true, true};

  static std::array<bool, 6> full_mask() { return {true, true, true, true, true, true}; }
  /// In-plane components 11, 22, 12.
  static std::array<bool, 6> in_plane_mask() { return {true, true, false, true, false, false}; }
  /// Axial component 11 only.
  static std::array<bool, 6> axial_mask() { return {true, false, false, false, false, false}; }

  static std::array<bool, 6> noise_mask(ModelVariant v) {
    switch (v) {
      case ModelVariant::ThreeD: return full_mask();
      case ModelVariant::PlaneStress: return in_plane_mask();
      case ModelVariant::Uniaxial: return axial_mask();
    }
    return full_mask();
  }

  int mask_count() const {
    int n = 0;
    for (bool b : mask) n += b ? 1 : 0;
    return n;
  }
};

/// Per-step misfit 1/2 ||sigma - target||^2 over the masked components, with
/// the tensor norm counting off-diagonals twice.
template <class T>
T stress_misfit(const SymTensor<T>& sigma, const Observation& obs) {
  if (obs.mask_count() == 0) throw std::invalid_argument("observation mask is empty");
  static constexpr double w[6] = {1, 1, 1, 2, 2, 2};
  T acc{};
  for (int i = 0; i < 6; ++i) {
    if (!obs.mask[i]) continue;
    T r = sigma.c[i] - obs.target.c[i];
    acc += (0.5 * w[i]) * r * r;
  }
  return acc;
}

}  // namespace mpcal
