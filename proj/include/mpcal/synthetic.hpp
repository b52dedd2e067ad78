#pragma once

#include <array>
#include <random>
#include <vector>

#include "mpcal/forward.hpp"
#include "mpcal/observation.hpp"

namespace mpcal {

/// Mask used by the misfit when none is configured: the full tensor norm,
/// except for the uniaxial variant where only the axial component carries
/// information.
inline std::array<bool, 6> default_objective_mask(ModelVariant v) {
  return v == ModelVariant::Uniaxial ? Observation::axial_mask() : Observation::full_mask();
}

/// Turns the stresses of a converged run into an observation series.
inline std::vector<Observation> observations_from_history(const ForwardHistory& hist,
                                                          const std::array<bool, 6>& mask) {
  std::vector<Observation> obs(hist.steps.size());
  for (std::size_t n = 0; n < hist.steps.size(); ++n) {
    obs[n].target = hist.steps[n].stress;
    obs[n].mask = mask;
  }
  return obs;
}

/// Adds i.i.d. zero-mean Gaussian noise to the selected stress components of
/// every observation. Components that the variant constrains to zero should
/// stay noise-free, so the selection is typically the variant's noise mask.
inline void add_stress_noise(std::vector<Observation>& obs, const std::array<bool, 6>& comps,
                             double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> gauss(0.0, sigma);
  for (Observation& o : obs)
    for (int i = 0; i < 6; ++i)
      if (comps[i]) o.target.c[i] += gauss(rng);
}

}  // namespace mpcal
