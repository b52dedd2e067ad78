#pragma once

#include <concepts>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mpcal/forward.hpp"
#include "mpcal/partials.hpp"

namespace mpcal {

/// Provider of per-step partial derivatives consumed by the gradient and
/// Hessian recursions. Steps are numbered 1..num_steps(); implementations
/// evaluate all partials at the converged forward trajectory.
template <class M>
concept StepPartialsModel = requires(const M& m, int n) {
  { m.num_steps() } -> std::convertible_to<int>;
  { m.state_dim() } -> std::convertible_to<int>;
  { m.param_dim() } -> std::convertible_to<int>;
  { m.residual_partials_at(n) } -> std::convertible_to<ResidualPartials>;
  { m.residual_second_partials_at(n) } -> std::convertible_to<ResidualSecondPartials>;
  { m.objective_partials_at(n) } -> std::convertible_to<ObjectivePartials>;
};

/// Per-step sensitivities and the assembled derivatives of the objective.
/// Gradients and Hessians are in raw parameter space over the active
/// parameters; the calibration layer transforms them to log space.
struct SensBundle {
  std::vector<Eigen::MatrixXd> W;    // dxi^n/dp, M x P per step
  std::vector<Eigen::VectorXd> phi;  // adjoint vector per step
  Eigen::VectorXd gradient;          // length P
  Eigen::MatrixXd hessian;           // P x P (empty unless requested)
  long long linear_solves = 0;
};

/// Forward recursion for the state sensitivity matrices W^n, one linear
/// solve per parameter per step. W^0 = 0 because the initial state is
/// independent of the parameters.
template <StepPartialsModel M>
std::vector<Eigen::MatrixXd> direct_sensitivities(const M& model, long long* solves = nullptr) {
  const int steps = model.num_steps();
  const int p = model.param_dim();
  std::vector<Eigen::MatrixXd> W(steps + 1);
  W[0] = Eigen::MatrixXd::Zero(model.state_dim(), p);
  for (int n = 1; n <= steps; ++n) {
    ResidualPartials rp = model.residual_partials_at(n);
    Eigen::MatrixXd rhs = -(rp.d_xi_prev * W[n - 1] + rp.d_p);
    W[n] = rp.d_xi.partialPivLu().solve(rhs);
    if (solves) *solves += p;
  }
  return W;
}

/// Gradient assembled from the state sensitivities.
template <StepPartialsModel M>
Eigen::VectorXd assemble_direct_gradient(const M& model, std::span<const Eigen::MatrixXd> W) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(model.param_dim());
  for (int n = 1; n <= model.num_steps(); ++n) {
    ObjectivePartials op = model.objective_partials_at(n);
    g += (op.d_xi * W[n] + op.d_p).transpose();
  }
  return g;
}

/// Backward recursion for the adjoint vectors, one transposed solve per
/// step regardless of the parameter count. The whole state history must be
/// available before the sweep starts.
template <StepPartialsModel M>
std::vector<Eigen::VectorXd> adjoint_solve(const M& model, long long* solves = nullptr) {
  const int steps = model.num_steps();
  std::vector<Eigen::VectorXd> phi(steps + 1);
  Eigen::VectorXd carry;  // (dC^{n+1}/dxi^n)^T phi^{n+1}
  for (int n = steps; n >= 1; --n) {
    ObjectivePartials op = model.objective_partials_at(n);
    ResidualPartials rp = model.residual_partials_at(n);
    Eigen::VectorXd rhs = -op.d_xi.transpose();
    if (n < steps) rhs -= carry;
    phi[n] = rp.d_xi.transpose().partialPivLu().solve(rhs);
    if (solves) *solves += 1;
    if (n > 1) carry = rp.d_xi_prev.transpose() * phi[n];
  }
  return phi;
}

/// Gradient assembled from the adjoint vectors.
template <StepPartialsModel M>
Eigen::VectorXd assemble_adjoint_gradient(const M& model, std::span<const Eigen::VectorXd> phi) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(model.param_dim());
  for (int n = 1; n <= model.num_steps(); ++n) {
    ObjectivePartials op = model.objective_partials_at(n);
    ResidualPartials rp = model.residual_partials_at(n);
    g += op.d_p.transpose() + rp.d_p.transpose() * phi[n];
  }
  return g;
}

/// Objective Hessian assembled from the state sensitivities and the adjoint
/// vectors together with second partials of the residual and misfit. Each
/// step contributes a manifestly symmetric matrix.
template <StepPartialsModel M>
Eigen::MatrixXd assemble_hessian(const M& model, std::span<const Eigen::MatrixXd> W,
                                 std::span<const Eigen::VectorXd> phi) {
  const int p = model.param_dim();
  const int m = model.state_dim();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
  for (int n = 1; n <= model.num_steps(); ++n) {
    ObjectivePartials op = model.objective_partials_at(n);
    ResidualSecondPartials r2 = model.residual_second_partials_at(n);
    const Eigen::MatrixXd& Wn = W[n];
    const Eigen::MatrixXd& Wm = W[n - 1];
    const Eigen::VectorXd& ph = phi[n];

    const int ox = r2.off_xi(), oxp = r2.off_xi_prev(), op_ = r2.off_p();
    Eigen::MatrixXd c_pp = r2.contract(ph, op_, p, op_, p);
    Eigen::MatrixXd c_px = r2.contract(ph, op_, p, ox, m);
    Eigen::MatrixXd c_pxm = r2.contract(ph, op_, p, oxp, m);
    Eigen::MatrixXd c_xx = r2.contract(ph, ox, m, ox, m);
    Eigen::MatrixXd c_xxm = r2.contract(ph, ox, m, oxp, m);
    Eigen::MatrixXd c_xmxm = r2.contract(ph, oxp, m, oxp, m);

    Eigen::MatrixXd mixed = (op.d2_pxi + c_px) * Wn;   // p-row, current-state column
    Eigen::MatrixXd mixed_prev = c_pxm * Wm;           // p-row, previous-state column
    Eigen::MatrixXd cross = Wn.transpose() * c_xxm * Wm;

    H += op.d2_pp + c_pp;
    H += mixed + mixed.transpose();
    H += Wn.transpose() * (op.d2_xixi + c_xx) * Wn;
    H += mixed_prev + mixed_prev.transpose();
    H += cross + cross.transpose();
    H += Wm.transpose() * c_xmxm * Wm;
  }
  return H;
}

/// Adapter exposing the elastoplastic model's per-step partials at a
/// converged forward trajectory.
class PlasticityStepModel {
 public:
  PlasticityStepModel(const ForwardHistory& hist, const ParamSet& params,
                      std::span<const Observation> obs)
      : hist_(&hist), params_(params), obs_(obs.begin(), obs.end()) {
    if (static_cast<int>(obs.size()) != hist.schedule.size())
      throw std::invalid_argument("observation series length does not match history");
    params_.validate();
  }

  int num_steps() const { return hist_->schedule.size(); }
  int state_dim() const { return mpcal::state_dim(hist_->schedule.variant); }
  int param_dim() const { return params_.n_active(); }

  StepContext context_at(int n) const {
    const int m = state_dim();
    StepContext c;
    c.variant = hist_->schedule.variant;
    c.branch = hist_->steps[n - 1].branch;
    c.xi = hist_->steps[n - 1].xi;
    c.xi_prev = n >= 2 ? hist_->steps[n - 2].xi : Eigen::VectorXd::Zero(m).eval();
    c.eps = hist_->schedule.strain[n - 1];
    c.params = params_;
    c.obs = obs_[n - 1];
    return c;
  }

  ResidualPartials residual_partials_at(int n) const { return residual_partials(context_at(n)); }
  ResidualSecondPartials residual_second_partials_at(int n) const {
    return residual_second_partials(context_at(n));
  }
  ObjectivePartials objective_partials_at(int n) const {
    return objective_partials(context_at(n));
  }

 private:
  const ForwardHistory* hist_;
  ParamSet params_;
  std::vector<Observation> obs_;
};

/// Total misfit over a converged history.
inline double objective(const ForwardHistory& hist, const ParamSet& params,
                        std::span<const Observation> obs) {
  (void)params;
  if (static_cast<int>(obs.size()) != hist.schedule.size())
    throw std::invalid_argument("observation series length does not match history");
  double total = 0.0;
  for (int n = 0; n < hist.schedule.size(); ++n)
    total += stress_misfit(hist.steps[n].stress, obs[n]);
  return total;
}

/// Gradient by the forward (direct) recursion; returns the W series for
/// reuse in the Hessian.
inline SensBundle direct_gradient(const ForwardHistory& hist, const ParamSet& params,
                                  std::span<const Observation> obs) {
  PlasticityStepModel model(hist, params, obs);
  SensBundle out;
  out.W = direct_sensitivities(model, &out.linear_solves);
  out.gradient = assemble_direct_gradient(model, out.W);
  return out;
}

/// Gradient by the adjoint backward recursion; returns the adjoint series.
inline SensBundle adjoint_gradient(const ForwardHistory& hist, const ParamSet& params,
                                   std::span<const Observation> obs) {
  PlasticityStepModel model(hist, params, obs);
  SensBundle out;
  out.phi = adjoint_solve(model, &out.linear_solves);
  out.gradient = assemble_adjoint_gradient(model, out.phi);
  return out;
}

/// Gradient and exact Hessian in one pass: the W series from the direct
/// recursion plus the adjoint series, at a total of N_L (P + 1) linear
/// solves. The gradient comes from the adjoint vectors at no extra solves.
inline SensBundle hessian_direct_adjoint(const ForwardHistory& hist, const ParamSet& params,
                                         std::span<const Observation> obs) {
  PlasticityStepModel model(hist, params, obs);
  SensBundle out;
  out.W = direct_sensitivities(model, &out.linear_solves);
  out.phi = adjoint_solve(model, &out.linear_solves);
  out.gradient = assemble_adjoint_gradient(model, out.phi);
  out.hessian = assemble_hessian(model, out.W, out.phi);
  return out;
}

// --- Logarithmic parameter scaling -------------------------------------------

/// eta_i = ln(p_i / p_ref_i) over the active parameters.
inline Eigen::VectorXd scale_params(const Eigen::VectorXd& p, const Eigen::VectorXd& ref) {
  if (p.size() != ref.size()) throw std::invalid_argument("scale_params: size mismatch");
  Eigen::VectorXd eta(p.size());
  for (int i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0) || !(ref[i] > 0.0))
      throw std::domain_error("log scaling requires positive parameter and reference values");
    eta[i] = std::log(p[i] / ref[i]);
  }
  return eta;
}

inline Eigen::VectorXd unscale_params(const Eigen::VectorXd& eta, const Eigen::VectorXd& ref) {
  if (eta.size() != ref.size()) throw std::invalid_argument("unscale_params: size mismatch");
  return (ref.array() * eta.array().exp()).matrix();
}

/// dJ/deta_i = dJ/dp_i * p_i.
inline Eigen::VectorXd transform_gradient(const Eigen::VectorXd& grad_p,
                                          const Eigen::VectorXd& p) {
  return (grad_p.array() * p.array()).matrix();
}

/// d2J/deta_i deta_j = d2J/dp_i dp_j * p_i p_j + delta_ij dJ/dp_i * p_i.
inline Eigen::MatrixXd transform_hessian(const Eigen::MatrixXd& hess_p,
                                         const Eigen::VectorXd& grad_p,
                                         const Eigen::VectorXd& p) {
  Eigen::MatrixXd h = p.asDiagonal() * hess_p * p.asDiagonal();
  h += (grad_p.array() * p.array()).matrix().asDiagonal();
  return h;
}

}  // namespace mpcal
