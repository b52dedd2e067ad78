#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mpcal/sensitivity.hpp"

namespace mpcal {

struct ProblemEval {
  double value = 0.0;
  Eigen::VectorXd grad;         // optimization (log) space
  Eigen::MatrixXd hess;         // optimization space, filled only on request
  Eigen::VectorXd report_grad;  // raw parameter space; drives termination and traces
};

/// The inverse problem seen by the optimizers: misfit of the forward model
/// against an observation series, as a function of the log-scaled active
/// parameters. Derivatives are exact (adjoint gradient, direct-adjoint
/// Hessian) and transformed at this boundary, so optimizers never see raw
/// parameter values except in the reporting gradient. Every linear solve
/// performed on behalf of this problem accumulates in solve_count().
class CalibrationProblem {
 public:
  CalibrationProblem(LoadSchedule schedule, std::vector<Observation> obs, ParamSet params,
                     SolverOpts opts = {})
      : schedule_(std::move(schedule)),
        obs_(std::move(obs)),
        params_(params),
        opts_(opts),
        ref_(params.active_ref()) {
    params_.validate();
    if (static_cast<int>(obs_.size()) != schedule_.size())
      throw std::invalid_argument("observation series length does not match schedule");
  }

  int dim() const { return params_.n_active(); }
  const ParamSet& params() const { return params_; }
  const LoadSchedule& schedule() const { return schedule_; }
  std::span<const Observation> observations() const { return obs_; }
  const SolverOpts& solver_opts() const { return opts_; }

  Eigen::VectorXd eta_from_p(const Eigen::VectorXd& p) const { return scale_params(p, ref_); }
  Eigen::VectorXd p_from_eta(const Eigen::VectorXd& eta) const {
    return unscale_params(eta, ref_);
  }
  Eigen::VectorXd initial_eta() const { return eta_from_p(params_.active_values()); }
  Eigen::VectorXd eta_lower() const { return scale_params(params_.active_lower(), ref_); }
  Eigen::VectorXd eta_upper() const { return scale_params(params_.active_upper(), ref_); }

  /// Parameter values reported in traces and summaries.
  Eigen::VectorXd trace_params(const Eigen::VectorXd& eta) const { return p_from_eta(eta); }

  double value(const Eigen::VectorXd& eta) const { return value_p(p_from_eta(eta)); }

  ProblemEval evaluate(const Eigen::VectorXd& eta, bool need_hessian) const {
    Eigen::VectorXd p = p_from_eta(eta);
    ParamSet ps = params_.with_active_values(p);
    ForwardHistory hist = run_forward(schedule_, ps, opts_);
    solves_ += hist.local_solves();
    SensBundle sens = need_hessian ? hessian_direct_adjoint(hist, ps, obs_)
                                   : adjoint_gradient(hist, ps, obs_);
    solves_ += sens.linear_solves;

    ProblemEval out;
    out.value = objective(hist, ps, obs_);
    out.report_grad = sens.gradient;
    out.grad = transform_gradient(sens.gradient, p);
    if (need_hessian) out.hess = transform_hessian(sens.hessian, sens.gradient, p);
    return out;
  }

  // Raw-parameter-space surface used by the derivative verification
  // harnesses and the genetic initializer. Every probe re-runs the full
  // forward solve so the model constraints hold at the probed parameters.

  double value_p(const Eigen::VectorXd& p) const {
    ParamSet ps = params_.with_active_values(p);
    ps.validate();
    return run_forward_objective<double>(schedule_, material_values<double>(ps), obs_, opts_,
                                         &solves_);
  }

  std::complex<double> value_p_complex(const Eigen::VectorXcd& p) const {
    Material<std::complex<double>> m = material_values<std::complex<double>>(params_);
    std::vector<Param> act = params_.active_params();
    for (int i = 0; i < static_cast<int>(act.size()); ++i) m[act[i]] = p[i];
    return run_forward_objective<std::complex<double>>(schedule_, m, obs_, opts_, &solves_);
  }

  Eigen::VectorXd gradient_p(const Eigen::VectorXd& p) const {
    ForwardHistory hist = history_at(p);
    SensBundle sens = adjoint_gradient(hist, params_.with_active_values(p), obs_);
    solves_ += sens.linear_solves;
    return sens.gradient;
  }

  Eigen::MatrixXd hessian_p(const Eigen::VectorXd& p) const {
    ForwardHistory hist = history_at(p);
    SensBundle sens = hessian_direct_adjoint(hist, params_.with_active_values(p), obs_);
    solves_ += sens.linear_solves;
    return sens.hessian;
  }

  ForwardHistory history_at(const Eigen::VectorXd& p) const {
    ParamSet ps = params_.with_active_values(p);
    ForwardHistory hist = run_forward(schedule_, ps, opts_);
    solves_ += hist.local_solves();
    return hist;
  }

  long long solve_count() const { return solves_; }
  void reset_solve_count() const { solves_ = 0; }

 private:
  LoadSchedule schedule_;
  std::vector<Observation> obs_;
  ParamSet params_;
  SolverOpts opts_;
  Eigen::VectorXd ref_;
  mutable long long solves_ = 0;
};

}  // namespace mpcal
