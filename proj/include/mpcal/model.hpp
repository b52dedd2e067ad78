#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "mpcal/material.hpp"
#include "mpcal/tensor.hpp"

namespace mpcal {

/// Stress-state assumption of the material point. Plane stress and uniaxial
/// stress augment the local state with the free off-axis stretches needed to
/// enforce the corresponding zero-stress conditions.
enum class ModelVariant { ThreeD, PlaneStress, Uniaxial };

/// Local state vector layout (length M, equal to the residual length N):
///   [0..4]  plastic strain components 11, 12, 13, 22, 23
///           (the 33 component is eliminated by plastic incompressibility)
///   [5]     equivalent plastic strain alpha
///   plane stress appends  [6] = eps33
///   uniaxial appends      [6] = eps22, [7] = eps33
inline constexpr int kAlpha = 5;

constexpr int state_dim(ModelVariant v) {
  switch (v) {
    case ModelVariant::ThreeD: return 6;
    case ModelVariant::PlaneStress: return 7;
    case ModelVariant::Uniaxial: return 8;
  }
  return 0;
}

/// Voigt slot of each stored plastic strain component, in state order.
inline constexpr int kPlasticVoigt[5] = {SymTensor<double>::k11, SymTensor<double>::k12,
                                         SymTensor<double>::k13, SymTensor<double>::k22,
                                         SymTensor<double>::k23};

enum class Branch { Elastic, Plastic };

/// Rebuilds the trace-free plastic strain tensor from the stored components.
template <class T>
SymTensor<T> plastic_strain(std::span<const T> xi) {
  SymTensor<T> ep;
  for (int k = 0; k < 5; ++k) ep.c[kPlasticVoigt[k]] = xi[k];
  ep.c[SymTensor<T>::k33] = -(xi[0] + xi[3]);
  return ep;
}

/// Total strain tensor for a step: prescribed components come from the load
/// input, free off-axis stretches from the state.
template <class T>
SymTensor<T> total_strain(ModelVariant v, std::span<const T> xi, const SymTensor<double>& eps) {
  SymTensor<T> e = promote<T>(eps);
  if (v == ModelVariant::PlaneStress) {
    e.c[SymTensor<T>::k33] = xi[6];
  } else if (v == ModelVariant::Uniaxial) {
    e.c[SymTensor<T>::k22] = xi[6];
    e.c[SymTensor<T>::k33] = xi[7];
  }
  return e;
}

template <class T>
SymTensor<T> stress_at_state(ModelVariant v, std::span<const T> xi, const SymTensor<double>& eps,
                             const Material<T>& m) {
  SymTensor<T> ee = total_strain(v, xi, eps) - plastic_strain(xi);
  return elastic_stress(ee, m);
}

/// Zero-stress constraint row for a free direction, written in strain form:
/// lambda tr[eps] + 2 mu (eps_bb - eps^p_bb), which is the corresponding
/// normal stress component given plastic incompressibility.
template <class T>
T off_axis_row(const SymTensor<T>& eps, const SymTensor<T>& ep, const Material<T>& m, int voigt) {
  return m.lambda() * eps.trace() + 2.0 * m.mu() * (eps.c[voigt] - ep.c[voigt]);
}

/// Local residual of one load step with the branch frozen. Row order matches
/// the state layout: five plastic strain rows, the alpha row (state
/// difference when elastic, yield consistency when plastic), then the
/// variant's zero-stress rows.
template <class T>
void local_residual(ModelVariant v, Branch branch, std::span<const T> xi,
                    std::span<const T> xi_prev, const SymTensor<double>& eps,
                    const Material<T>& m, std::span<T> out) {
  const int n = state_dim(v);
  if (static_cast<int>(xi.size()) != n || static_cast<int>(out.size()) != n)
    throw std::invalid_argument("local_residual: state size does not match variant");

  SymTensor<T> e = total_strain(v, xi, eps);
  SymTensor<T> ep = plastic_strain(xi);

  if (branch == Branch::Elastic) {
    for (int k = 0; k < 5; ++k) out[k] = xi[k] - xi_prev[k];
    out[kAlpha] = xi[kAlpha] - xi_prev[kAlpha];
  } else {
    SymTensor<T> sig = elastic_stress(e - ep, m);
    SymTensor<T> dir = flow_normal(sig);
    T dalpha = xi[kAlpha] - xi_prev[kAlpha];
    for (int k = 0; k < 5; ++k)
      out[k] = xi[k] - xi_prev[k] - dalpha * dir.c[kPlasticVoigt[k]];
    out[kAlpha] = yield_value(sig, xi[kAlpha], m);
  }

  if (v == ModelVariant::PlaneStress) {
    out[6] = off_axis_row(e, ep, m, SymTensor<T>::k33);
  } else if (v == ModelVariant::Uniaxial) {
    out[6] = off_axis_row(e, ep, m, SymTensor<T>::k22);
    out[7] = off_axis_row(e, ep, m, SymTensor<T>::k33);
  }
}

template <class T>
std::vector<T> local_residual(ModelVariant v, Branch branch, std::span<const T> xi,
                              std::span<const T> xi_prev, const SymTensor<double>& eps,
                              const Material<T>& m) {
  std::vector<T> out(state_dim(v));
  local_residual(v, branch, xi, xi_prev, eps, m, std::span<T>(out));
  return out;
}

}  // namespace mpcal
