#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mpcal/dual.hpp"
#include "mpcal/material.hpp"
#include "mpcal/model.hpp"
#include "mpcal/observation.hpp"

namespace mpcal {

/// Everything defining one converged load step, with the branch frozen as
/// recorded by the forward solve. Partial derivatives never mix branch
/// formulas: they differentiate the residual of the recorded branch only.
struct StepContext {
  ModelVariant variant{};
  Branch branch{};
  Eigen::VectorXd xi;       // converged state at this step
  Eigen::VectorXd xi_prev;  // converged state at the previous step (zero for the first)
  SymTensor<double> eps;    // prescribed strain input
  ParamSet params;
  Observation obs;
};

/// First partials of the step residual with respect to the current state,
/// the previous state, and the active parameters.
struct ResidualPartials {
  Eigen::MatrixXd d_xi;       // N x M
  Eigen::MatrixXd d_xi_prev;  // N x M
  Eigen::MatrixXd d_p;        // N x P
};

/// Second partials of the step residual, stored densely: block(q) is the
/// full symmetric second-derivative matrix of residual row q over the
/// concatenated variables [xi, xi_prev, p]. Accessors slice the blocks that
/// appear in the Hessian assembly.
class ResidualSecondPartials {
 public:
  ResidualSecondPartials(int n_rows, int m, int p) : m_(m), p_(p) {
    blocks_.resize(n_rows, Eigen::MatrixXd::Zero(2 * m + p, 2 * m + p));
  }

  Eigen::MatrixXd& block(int q) { return blocks_[q]; }
  const Eigen::MatrixXd& block(int q) const { return blocks_[q]; }

  /// phi-weighted contraction of a sub-block: sum_q phi[q] d2C_q/(da db).
  Eigen::MatrixXd contract(const Eigen::VectorXd& phi, int row_off, int rows, int col_off,
                           int cols) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    for (int q = 0; q < static_cast<int>(blocks_.size()); ++q)
      out += phi[q] * blocks_[q].block(row_off, col_off, rows, cols);
    return out;
  }

  // Offsets of the variable groups inside the concatenated vector.
  int off_xi() const { return 0; }
  int off_xi_prev() const { return m_; }
  int off_p() const { return 2 * m_; }
  int m() const { return m_; }
  int p() const { return p_; }

 private:
  int m_, p_;
  std::vector<Eigen::MatrixXd> blocks_;
};

/// First and second partials of the per-step misfit term with respect to the
/// current state and the active parameters.
struct ObjectivePartials {
  Eigen::RowVectorXd d_xi;  // 1 x M
  Eigen::RowVectorXd d_p;   // 1 x P
  Eigen::MatrixXd d2_pp;    // P x P
  Eigen::MatrixXd d2_pxi;   // P x M
  Eigen::MatrixXd d2_xixi;  // M x M
};

namespace detail {

// Concatenated-variable evaluation: z = [xi (M), xi_prev (M), p_active (P)].
// Seeding slot a (and b for nested duals) differentiates the residual or the
// misfit along those coordinates.

template <class T>
struct StepVars {
  std::vector<T> xi, xi_prev;
  Material<T> mat;
};

template <class T>
void seed_slot(StepVars<T>& v, const std::vector<Param>& act, int m, int slot, double value) {
  if (slot < m) {
    v.xi[slot].d += value;
  } else if (slot < 2 * m) {
    v.xi_prev[slot - m].d += value;
  } else {
    v.mat[act[slot - 2 * m]].d += value;
  }
}

// Seeds the inner dual of a nested number: the second differentiation
// direction of a hyper-dual evaluation.
template <class T>
void seed_slot_inner(StepVars<Dual<Dual<T>>>& v, const std::vector<Param>& act, int m, int slot) {
  if (slot < m)
    v.xi[slot].v.d += 1.0;
  else if (slot < 2 * m)
    v.xi_prev[slot - m].v.d += 1.0;
  else
    v.mat[act[slot - 2 * m]].v.d += 1.0;
}

template <class T>
StepVars<T> make_vars(const StepContext& c) {
  const int m = static_cast<int>(c.xi.size());
  StepVars<T> v;
  v.xi.resize(m);
  v.xi_prev.resize(m);
  for (int k = 0; k < m; ++k) {
    v.xi[k] = T(c.xi[k]);
    v.xi_prev[k] = T(c.xi_prev[k]);
  }
  v.mat = material_values<T>(c.params);
  return v;
}

template <class T>
std::vector<T> eval_residual(const StepContext& c, const StepVars<T>& v) {
  return local_residual<T>(c.variant, c.branch, std::span<const T>(v.xi),
                           std::span<const T>(v.xi_prev), c.eps, v.mat);
}

template <class T>
T eval_misfit(const StepContext& c, const StepVars<T>& v) {
  SymTensor<T> sig = stress_at_state<T>(c.variant, std::span<const T>(v.xi), c.eps, v.mat);
  return stress_misfit(sig, c.obs);
}

}  // namespace detail

/// Exact first partials of the branch-frozen residual, one dual seed per
/// column. No finite differencing anywhere.
inline ResidualPartials residual_partials(const StepContext& c) {
  using D1 = Dual<double>;
  const int m = static_cast<int>(c.xi.size());
  const std::vector<Param> act = c.params.active_params();
  const int p = static_cast<int>(act.size());

  ResidualPartials out;
  out.d_xi.resize(m, m);
  out.d_xi_prev.resize(m, m);
  out.d_p.resize(m, p);

  for (int slot = 0; slot < 2 * m + p; ++slot) {
    auto v = detail::make_vars<D1>(c);
    detail::seed_slot(v, act, m, slot, 1.0);
    std::vector<D1> r = detail::eval_residual(c, v);
    for (int q = 0; q < m; ++q) {
      if (slot < m)
        out.d_xi(q, slot) = r[q].d;
      else if (slot < 2 * m)
        out.d_xi_prev(q, slot - m) = r[q].d;
      else
        out.d_p(q, slot - 2 * m) = r[q].d;
    }
  }
  return out;
}

/// Exact second partials of the branch-frozen residual from nested dual
/// seeds, one direction pair at a time. Each block is filled for a <= b and
/// mirrored, so symmetry under index exchange holds by construction.
inline ResidualSecondPartials residual_second_partials(const StepContext& c) {
  using D2 = Dual<Dual<double>>;
  const int m = static_cast<int>(c.xi.size());
  const std::vector<Param> act = c.params.active_params();
  const int p = static_cast<int>(act.size());
  const int total = 2 * m + p;

  ResidualSecondPartials out(m, m, p);
  for (int a = 0; a < total; ++a) {
    for (int b = a; b < total; ++b) {
      auto v = detail::make_vars<D2>(c);
      detail::seed_slot(v, act, m, a, 1.0);
      detail::seed_slot_inner(v, act, m, b);
      std::vector<D2> r = detail::eval_residual(c, v);
      for (int q = 0; q < m; ++q) {
        double d2 = r[q].d.d;
        out.block(q)(a, b) = d2;
        out.block(q)(b, a) = d2;
      }
    }
  }
  return out;
}

/// Exact first and second partials of the per-step misfit. The previous
/// state never enters the misfit, so only the [xi, p] slots are seeded.
inline ObjectivePartials objective_partials(const StepContext& c) {
  using D1 = Dual<double>;
  using D2 = Dual<Dual<double>>;
  const int m = static_cast<int>(c.xi.size());
  const std::vector<Param> act = c.params.active_params();
  const int p = static_cast<int>(act.size());

  ObjectivePartials out;
  out.d_xi.resize(m);
  out.d_p.resize(p);
  out.d2_pp = Eigen::MatrixXd::Zero(p, p);
  out.d2_pxi = Eigen::MatrixXd::Zero(p, m);
  out.d2_xixi = Eigen::MatrixXd::Zero(m, m);

  // Slot map for the misfit: [xi (m), p (p)]; xi_prev slots are skipped.
  auto seed1 = [&](int slot) {
    auto v = detail::make_vars<D1>(c);
    detail::seed_slot(v, act, m, slot < m ? slot : slot + m, 1.0);
    return detail::eval_misfit(c, v).d;
  };
  for (int k = 0; k < m; ++k) out.d_xi[k] = seed1(k);
  for (int j = 0; j < p; ++j) out.d_p[j] = seed1(m + j);

  auto seed2 = [&](int sa, int sb) {
    auto v = detail::make_vars<D2>(c);
    detail::seed_slot(v, act, m, sa < m ? sa : sa + m, 1.0);
    detail::seed_slot_inner(v, act, m, sb < m ? sb : sb + m);
    return detail::eval_misfit(c, v).d.d;
  };
  for (int a = 0; a < m + p; ++a) {
    for (int b = a; b < m + p; ++b) {
      double d2 = seed2(a, b);
      bool ap = a >= m, bp = b >= m;
      if (!ap && !bp) {
        out.d2_xixi(a, b) = d2;
        out.d2_xixi(b, a) = d2;
      } else if (ap && bp) {
        out.d2_pp(a - m, b - m) = d2;
        out.d2_pp(b - m, a - m) = d2;
      } else {
        // with a <= b the mixed case is always (a in xi, b in p)
        out.d2_pxi(b - m, a) = d2;
      }
    }
  }
  return out;
}

}  // namespace mpcal
