#pragma once

// Shared problem setups for the test suite: the synthetic biaxial
// plane-stress calibration and the uniaxial tension surrogate.

#include <random>
#include <vector>

#include "mpcal/forward.hpp"
#include "mpcal/problem.hpp"
#include "mpcal/synthetic.hpp"

namespace fixtures {

using namespace mpcal;

// Biaxial plane-stress loading: stretch to 0.02 along e1 with e2 held, then
// stretch to 0.02 along e2 with e1 held at 0.02. Fifty steps per leg.
inline LoadSchedule biaxial_schedule(int steps_per_leg = 50) {
  LoadSchedule sched;
  sched.variant = ModelVariant::PlaneStress;
  const double target = 0.02;
  for (int i = 1; i <= steps_per_leg; ++i) {
    SymTensor<double> e;
    e.c[SymTensor<double>::k11] = target * i / steps_per_leg;
    sched.strain.push_back(e);
  }
  for (int i = 1; i <= steps_per_leg; ++i) {
    SymTensor<double> e;
    e.c[SymTensor<double>::k11] = target;
    e.c[SymTensor<double>::k22] = target * i / steps_per_leg;
    sched.strain.push_back(e);
  }
  return sched;
}

inline ParamSet plane_truth() {
  return ParamSet(70000.0, 0.3, 200.0, 0.0, 200.0, 20.0);
}

// Initial guess for the plane-stress calibration; Y, S, D active with the
// guess as scaling reference.
inline ParamSet plane_initial() {
  ParamSet ps(70000.0, 0.3, 220.0, 0.0, 220.0, 22.0);
  ps.set_active(Param::Y);
  ps.set_active(Param::S);
  ps.set_active(Param::D);
  return ps;
}

inline std::vector<Observation> plane_observations(double sigma_noise = 0.0,
                                                   std::uint64_t seed = 0) {
  ForwardHistory hist = run_forward(biaxial_schedule(), plane_truth());
  auto obs = observations_from_history(hist, default_objective_mask(ModelVariant::PlaneStress));
  if (sigma_noise > 0.0) {
    std::mt19937_64 rng(seed);
    add_stress_noise(obs, Observation::noise_mask(ModelVariant::PlaneStress), sigma_noise, rng);
  }
  return obs;
}

inline CalibrationProblem plane_problem(double sigma_noise = 0.0, std::uint64_t seed = 0) {
  return CalibrationProblem(biaxial_schedule(), plane_observations(sigma_noise, seed),
                            plane_initial());
}

// Uniaxial tension ramp to 0.02 axial strain.
inline LoadSchedule uniaxial_schedule(int steps = 100, double target = 0.02) {
  LoadSchedule sched;
  sched.variant = ModelVariant::Uniaxial;
  for (int i = 1; i <= steps; ++i) {
    SymTensor<double> e;
    e.c[SymTensor<double>::k11] = target * i / steps;
    sched.strain.push_back(e);
  }
  return sched;
}

// Stainless-steel-like parameters generating the uniaxial surrogate data.
inline ParamSet uniaxial_truth() {
  return ParamSet(183000.0, 0.29, 148.223, 3472.982, 177.961, 2589.541);
}

inline ParamSet uniaxial_initial() {
  ParamSet ps(183000.0, 0.29, 140.0, 3400.0, 180.0, 1500.0);
  ps.set_active(Param::Y);
  ps.set_active(Param::K);
  ps.set_active(Param::S);
  ps.set_active(Param::D);
  return ps;
}

inline std::vector<Observation> uniaxial_observations() {
  ForwardHistory hist = run_forward(uniaxial_schedule(), uniaxial_truth());
  return observations_from_history(hist, default_objective_mask(ModelVariant::Uniaxial));
}

inline CalibrationProblem uniaxial_problem() {
  return CalibrationProblem(uniaxial_schedule(), uniaxial_observations(), uniaxial_initial());
}

}  // namespace fixtures
