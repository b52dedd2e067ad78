#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpcal/dual.hpp"
#include "mpcal/material.hpp"
#include "mpcal/model.hpp"
#include "mpcal/observation.hpp"

namespace mpcal {

struct SolverOpts {
  double tol = 1e-10;  // infinity norm of the local residual, absolute
  int max_iter = 50;
};

/// Prescribed strain inputs for every load step. Which components are
/// prescribed depends on the variant (all six for 3D; 11, 22, 12 in plane
/// stress; 11 only in uniaxial stress); the rest are ignored and recovered
/// from the state instead.
struct LoadSchedule {
  ModelVariant variant = ModelVariant::ThreeD;
  std::vector<SymTensor<double>> strain;

  int size() const { return static_cast<int>(strain.size()); }
};

struct StepSolveError : std::runtime_error {
  explicit StepSolveError(const std::string& what, double res = 0.0)
      : std::runtime_error(what), residual_norm(res) {}
  double residual_norm;
};

struct ForwardSolveError : std::runtime_error {
  ForwardSolveError(int step_, const std::string& what)
      : std::runtime_error("forward solve failed at step " + std::to_string(step_) + ": " + what),
        step(step_) {}
  int step;
};

namespace detail {

template <class T>
Material<Dual<T>> lift(const Material<T>& m) {
  Material<Dual<T>> out;
  for (int i = 0; i < kNumParams; ++i) {
    Param p = static_cast<Param>(i);
    out[p] = Dual<T>(m[p]);
  }
  return out;
}

template <class T>
double residual_norm_inf(const std::vector<T>& r) {
  double nrm = 0.0;
  for (const T& x : r) nrm = std::max(nrm, std::abs(real_part(x)));
  return nrm;
}

template <class T>
inline constexpr int kComplexPolishIters = 0;
template <>
inline constexpr int kComplexPolishIters<std::complex<double>> = 1;

inline bool finite_value(double x) { return std::isfinite(x); }
inline bool finite_value(const std::complex<double>& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace detail

/// Jacobian of the branch-frozen residual with respect to the current state,
/// obtained by seeding one dual direction per column. This is the matrix
/// factored by the local Newton solve.
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> residual_state_jacobian(
    ModelVariant v, Branch branch, std::span<const T> xi, std::span<const T> xi_prev,
    const SymTensor<double>& eps, const Material<T>& m) {
  using D = Dual<T>;
  const int n = state_dim(v);
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> jac(n, n);
  Material<D> md = detail::lift(m);
  std::vector<D> xp(n);
  for (int k = 0; k < n; ++k) xp[k] = D(xi_prev[k]);
  for (int col = 0; col < n; ++col) {
    std::vector<D> xd(n);
    for (int k = 0; k < n; ++k) xd[k] = D(xi[k], T(k == col ? 1.0 : 0.0));
    std::vector<D> r =
        local_residual<D>(v, branch, std::span<const D>(xd), std::span<const D>(xp), eps, md);
    for (int q = 0; q < n; ++q) jac(q, col) = r[q].d;
  }
  return jac;
}

template <class T>
struct TrialState {
  std::vector<T> xi;
  T f_trial{};
};

/// Elastic predictor: plastic variables frozen at the previous step, free
/// off-axis stretches solved from the linear zero-stress rows in closed
/// form. The resulting state zeroes the elastic-branch residual exactly.
template <class T>
TrialState<T> elastic_trial(std::span<const T> xi_prev, const SymTensor<double>& eps,
                            const Material<T>& m, ModelVariant v) {
  std::vector<T> xi(xi_prev.begin(), xi_prev.end());
  T lam = m.lambda();
  T mu2 = 2.0 * m.mu();
  if (v == ModelVariant::PlaneStress) {
    T ep33 = -(xi[0] + xi[3]);
    xi[6] = (mu2 * ep33 - lam * (eps.c[0] + eps.c[1])) / (lam + mu2);
  } else if (v == ModelVariant::Uniaxial) {
    T ep22 = xi[3];
    T ep33 = -(xi[0] + xi[3]);
    T a = lam + mu2;
    T r1 = mu2 * ep22 - lam * eps.c[0];
    T r2 = mu2 * ep33 - lam * eps.c[0];
    T det = a * a - lam * lam;
    xi[6] = (a * r1 - lam * r2) / det;
    xi[7] = (a * r2 - lam * r1) / det;
  }
  SymTensor<T> sig = stress_at_state<T>(v, std::span<const T>(xi), eps, m);
  T f = yield_value(sig, xi[kAlpha], m);
  return {std::move(xi), f};
}

template <class T>
struct StepSolution {
  std::vector<T> xi;
  Branch branch;
  int iterations;        // local Newton iterations, one linear solve each
  double residual_norm;  // infinity norm of the real part at exit
};

/// Advances one load step. The branch is chosen by the sign of the trial
/// yield value; a plastic step runs Newton on the full residual from the
/// trial state. Convergence is tested on the real part of the residual;
/// complex instantiations take one extra iteration after convergence so the
/// imaginary parts settle onto the linearized sensitivity exactly.
template <class T>
StepSolution<T> solve_step(std::span<const T> xi_prev, const SymTensor<double>& eps,
                           const Material<T>& m, ModelVariant v, const SolverOpts& opts = {}) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  TrialState<T> trial = elastic_trial(xi_prev, eps, m, v);
  if (!(real_part(trial.f_trial) > 0.0)) {
    std::vector<T> r = local_residual<T>(v, Branch::Elastic, std::span<const T>(trial.xi),
                                         xi_prev, eps, m);
    return {std::move(trial.xi), Branch::Elastic, 0, detail::residual_norm_inf(r)};
  }

  const int n = state_dim(v);
  std::vector<T> xi = std::move(trial.xi);
  int polish = detail::kComplexPolishIters<T>;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    std::vector<T> r = local_residual<T>(v, Branch::Plastic, std::span<const T>(xi),
                                         xi_prev, eps, m);
    double nrm = detail::residual_norm_inf(r);
    if (nrm <= opts.tol && polish-- <= 0) return {std::move(xi), Branch::Plastic, iter, nrm};

    Mat jac = residual_state_jacobian<T>(v, Branch::Plastic, std::span<const T>(xi), xi_prev,
                                         eps, m);
    Eigen::PartialPivLU<Mat> lu(jac);
    Vec rhs(n);
    for (int q = 0; q < n; ++q) rhs[q] = -r[q];
    Vec dx = lu.solve(rhs);
    for (int k = 0; k < n; ++k) {
      if (!detail::finite_value(dx[k])) throw StepSolveError("singular local Jacobian", nrm);
      xi[k] += dx[k];
    }
  }
  std::vector<T> r = local_residual<T>(v, Branch::Plastic, std::span<const T>(xi), xi_prev,
                                       eps, m);
  throw StepSolveError("local Newton did not converge within " +
                           std::to_string(opts.max_iter) + " iterations (residual " +
                           std::to_string(detail::residual_norm_inf(r)) + ")",
                       detail::residual_norm_inf(r));
}

struct StepRecord {
  Eigen::VectorXd xi;
  Branch branch;
  SymTensor<double> stress;
  int iterations;
  double residual_norm;
};

/// Converged states, stresses and solve diagnostics for a whole load
/// schedule, together with the schedule that produced them.
struct ForwardHistory {
  LoadSchedule schedule;
  std::vector<StepRecord> steps;

  long long local_solves() const {
    long long n = 0;
    for (const auto& s : steps) n += s.iterations;
    return n;
  }
};

/// Runs the strain-driven model through the whole schedule from the
/// stress-free initial state.
inline ForwardHistory run_forward(const LoadSchedule& sched, const ParamSet& params,
                                  const SolverOpts& opts = {}) {
  params.validate();
  const int n = state_dim(sched.variant);
  Material<double> m = material_values<double>(params);

  ForwardHistory hist;
  hist.schedule = sched;
  hist.steps.reserve(sched.strain.size());

  std::vector<double> prev(n, 0.0);
  for (int step = 0; step < sched.size(); ++step) {
    try {
      StepSolution<double> sol = solve_step<double>(std::span<const double>(prev),
                                                    sched.strain[step], m, sched.variant, opts);
      StepRecord rec;
      rec.xi = Eigen::Map<const Eigen::VectorXd>(sol.xi.data(), n);
      rec.branch = sol.branch;
      rec.stress = stress_at_state<double>(sched.variant, std::span<const double>(sol.xi),
                                           sched.strain[step], m);
      rec.iterations = sol.iterations;
      rec.residual_norm = sol.residual_norm;
      hist.steps.push_back(std::move(rec));
      prev = std::move(sol.xi);
    } catch (const StepSolveError& e) {
      throw ForwardSolveError(step + 1, e.what());
    }
  }
  return hist;
}

/// Objective-only forward sweep, generic over the scalar type. Used by
/// finite-difference and complex-step probes and by line searches, where the
/// state history is not needed. Adds one solve per local Newton iteration to
/// the counter when given.
template <class T>
T run_forward_objective(const LoadSchedule& sched, const Material<T>& m,
                        std::span<const Observation> obs, const SolverOpts& opts = {},
                        long long* solve_count = nullptr) {
  if (static_cast<int>(obs.size()) != sched.size())
    throw std::invalid_argument("observation series length does not match schedule");
  const int n = state_dim(sched.variant);
  std::vector<T> prev(n, T(0.0));
  T total{};
  for (int step = 0; step < sched.size(); ++step) {
    try {
      StepSolution<T> sol =
          solve_step<T>(std::span<const T>(prev), sched.strain[step], m, sched.variant, opts);
      if (solve_count) *solve_count += sol.iterations;
      SymTensor<T> sig = stress_at_state<T>(sched.variant, std::span<const T>(sol.xi),
                                            sched.strain[step], m);
      total += stress_misfit(sig, obs[step]);
      prev = std::move(sol.xi);
    } catch (const StepSolveError& e) {
      throw ForwardSolveError(step + 1, e.what());
    }
  }
  return total;
}

}  // namespace mpcal
