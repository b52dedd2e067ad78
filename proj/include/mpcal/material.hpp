#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpcal/tensor.hpp"

namespace mpcal {

/// The six material parameters of the isotropic elastoplastic model with
/// combined linear and saturation hardening, in a fixed order.
enum class Param : int { E = 0, Nu, Y, K, S, D };
inline constexpr int kNumParams = 6;

inline const char* param_name(Param p) {
  static constexpr std::array<const char*, 6> names = {"E", "nu", "Y", "K", "S", "D"};
  return names[static_cast<int>(p)];
}

/// Scalar-generic parameter values used during model evaluation. Seeding a
/// member with a derivative-carrying or complex scalar differentiates the
/// whole model with respect to that parameter.
template <class T>
struct Material {
  T E{}, nu{}, Y{}, K{}, S{}, D{};

  T lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  T mu() const { return E / (2.0 * (1.0 + nu)); }

  T& operator[](Param p) {
    switch (p) {
      case Param::E: return E;
      case Param::Nu: return nu;
      case Param::Y: return Y;
      case Param::K: return K;
      case Param::S: return S;
      case Param::D: return D;
    }
    throw std::logic_error("bad parameter index");
  }
};

/// One calibration parameter: current value plus its role in the inverse
/// problem (design variable or fixed constant, search bounds, reference
/// value for logarithmic scaling).
struct ParamSpec {
  double value = 0.0;
  bool active = false;
  double lower = 0.0;
  double upper = 0.0;
  double ref = 0.0;
};

/// The full parameter set. Active entries are the design variables of the
/// calibration; bounds and reference values default from the current value
/// when left unset.
class ParamSet {
 public:
  ParamSet() = default;

  ParamSet(double E, double nu, double Y, double K, double S, double D) {
    set_value(Param::E, E);
    set_value(Param::Nu, nu);
    set_value(Param::Y, Y);
    set_value(Param::K, K);
    set_value(Param::S, S);
    set_value(Param::D, D);
  }

  double value(Param p) const { return spec_[idx(p)].value; }
  void set_value(Param p, double v) { spec_[idx(p)].value = v; }

  ParamSpec& spec(Param p) { return spec_[idx(p)]; }
  const ParamSpec& spec(Param p) const { return spec_[idx(p)]; }

  /// Marks a parameter as a design variable. Bounds default to
  /// [1e-3, 1e3] x ref; the reference defaults to the current value.
  void set_active(Param p, double lower = 0.0, double upper = 0.0, double ref = 0.0) {
    ParamSpec& s = spec_[idx(p)];
    s.active = true;
    s.ref = ref > 0.0 ? ref : s.value;
    s.lower = lower > 0.0 ? lower : 1e-3 * s.ref;
    s.upper = upper > 0.0 ? upper : 1e3 * s.ref;
  }

  int n_active() const {
    int n = 0;
    for (const auto& s : spec_) n += s.active ? 1 : 0;
    return n;
  }

  std::vector<Param> active_params() const {
    std::vector<Param> out;
    for (int i = 0; i < kNumParams; ++i)
      if (spec_[i].active) out.push_back(static_cast<Param>(i));
    return out;
  }

  Eigen::VectorXd active_values() const { return gather(&ParamSpec::value); }
  Eigen::VectorXd active_lower() const { return gather(&ParamSpec::lower); }
  Eigen::VectorXd active_upper() const { return gather(&ParamSpec::upper); }
  Eigen::VectorXd active_ref() const { return gather(&ParamSpec::ref); }

  ParamSet with_active_values(const Eigen::VectorXd& v) const {
    ParamSet out = *this;
    int k = 0;
    for (auto& s : out.spec_)
      if (s.active) s.value = v[k++];
    return out;
  }

  double lame_lambda() const {
    double E = value(Param::E), nu = value(Param::Nu);
    return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  }
  double lame_mu() const { return value(Param::E) / (2.0 * (1.0 + value(Param::Nu))); }

  /// Enforces the physical admissibility ranges and, for active parameters,
  /// bound ordering and positive references.
  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("parameters: " + m); };
    if (!(value(Param::E) > 0.0)) fail("E must be positive");
    if (!(value(Param::Nu) > -1.0 && value(Param::Nu) < 0.5)) fail("nu must lie in (-1, 0.5)");
    if (!(value(Param::Y) > 0.0)) fail("Y must be positive");
    if (value(Param::K) < 0.0) fail("K must be non-negative");
    if (value(Param::S) < 0.0) fail("S must be non-negative");
    if (value(Param::D) < 0.0) fail("D must be non-negative");
    for (int i = 0; i < kNumParams; ++i) {
      const ParamSpec& s = spec_[i];
      if (!s.active) continue;
      const char* n = param_name(static_cast<Param>(i));
      if (!(s.ref > 0.0)) fail(std::string("reference value for ") + n + " must be positive");
      if (!(s.lower <= s.value && s.value <= s.upper))
        fail(std::string("value of ") + n + " violates its bounds");
    }
  }

 private:
  static int idx(Param p) { return static_cast<int>(p); }

  Eigen::VectorXd gather(double ParamSpec::* field) const {
    Eigen::VectorXd v(n_active());
    int k = 0;
    for (const auto& s : spec_)
      if (s.active) v[k++] = s.*field;
    return v;
  }

  std::array<ParamSpec, kNumParams> spec_{};
};

template <class T>
Material<T> material_values(const ParamSet& ps) {
  Material<T> m;
  for (int i = 0; i < kNumParams; ++i) {
    Param p = static_cast<Param>(i);
    m[p] = T(ps.value(p));
  }
  return m;
}

// --- Constitutive functions -------------------------------------------------

/// Isotropic linear elasticity applied to an elastic strain.
template <class T>
SymTensor<T> elastic_stress(const SymTensor<T>& eps_e, const Material<T>& m) {
  T lam = m.lambda();
  T two_mu = 2.0 * m.mu();
  T bulk = lam * eps_e.trace();
  SymTensor<T> sig;
  for (int i = 0; i < 6; ++i) sig.c[i] = two_mu * eps_e.c[i];
  sig.c[0] += bulk;
  sig.c[1] += bulk;
  sig.c[2] += bulk;
  return sig;
}

/// Combined linear and saturation hardening, zero at alpha = 0.
template <class T>
T hardening(const T& alpha, const Material<T>& m) {
  using std::exp;
  return m.K * alpha + m.S * (1.0 - exp(-m.D * alpha));
}

/// Von Mises effective stress sqrt(3/2) ||dev sigma||.
template <class T>
T effective_stress(const SymTensor<T>& sigma) {
  using std::sqrt;
  return sqrt(T(1.5)) * norm(sigma.deviator());
}

template <class T>
T yield_value(const SymTensor<T>& sigma, const T& alpha, const Material<T>& m) {
  return effective_stress(sigma) - (m.Y + hardening(alpha, m));
}

struct DegenerateDeviatorError : std::domain_error {
  DegenerateDeviatorError()
      : std::domain_error("flow direction undefined: deviatoric stress is numerically zero") {}
};

/// Direction of plastic flow, sqrt(3/2) s/||s||. Trace-free with squared
/// norm 3/2. Only defined away from hydrostatic states; the plastic branch
/// is entered only when the trial state yields, which guarantees a nonzero
/// deviator, so the degeneracy error is a guard rather than a normal path.
template <class T>
SymTensor<T> flow_normal(const SymTensor<T>& sigma) {
  using std::sqrt;
  SymTensor<T> s = sigma.deviator();
  T ns = norm(s);
  double tol = 1e-12 * std::max(1.0, real_part(norm(sigma)));
  if (!(real_part(ns) > tol)) throw DegenerateDeviatorError();
  T scale = sqrt(T(1.5)) / ns;
  return s * scale;
}

}  // namespace mpcal
