#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpcal/problem.hpp"

namespace mpcal {

/// A problem whose objective can be probed at perturbed parameters (real or
/// complex) and whose exact first and second derivatives are available for
/// comparison. Probes must satisfy the model constraints, so implementations
/// re-run the forward solve at every probed point.
template <class P>
concept CheckableProblem = requires(const P& p, const Eigen::VectorXd& x,
                                    const Eigen::VectorXcd& z) {
  { p.value_p(x) } -> std::convertible_to<double>;
  { p.value_p_complex(z) } -> std::convertible_to<std::complex<double>>;
  { p.gradient_p(x) } -> std::convertible_to<Eigen::VectorXd>;
  { p.hessian_p(x) } -> std::convertible_to<Eigen::MatrixXd>;
};

/// Step sizes 1e-2, 1e-3, ..., 1e-10.
inline std::vector<double> default_h_sweep() {
  std::vector<double> h;
  for (int k = 2; k <= 10; ++k) h.push_back(std::pow(10.0, -k));
  return h;
}

/// Direction with components drawn from U[-1, 1].
inline Eigen::VectorXd random_direction(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd d(n);
  do {
    for (int i = 0; i < n; ++i) d[i] = u(rng);
  } while (d.lpNorm<Eigen::Infinity>() == 0.0);
  return d;
}

/// Error-versus-step-size record of one derivative check.
struct CheckReport {
  Eigen::VectorXd direction;
  std::vector<double> h;          // strictly decreasing
  std::vector<double> abs_error;  // non-negative, one per step size
  double exact = 0.0;             // the sensitivity-analysis value being checked
  bool pass = false;

  int min_index() const {
    return static_cast<int>(std::min_element(abs_error.begin(), abs_error.end()) -
                            abs_error.begin());
  }
  double min_error() const { return abs_error[min_index()]; }
  double h_at_min() const { return h[min_index()]; }
  double min_rel_error() const {
    double denom = std::abs(exact);
    return denom > 0.0 ? min_error() / denom : std::numeric_limits<double>::infinity();
  }

  /// True when the error profile decreases down to its minimum and grows
  /// afterwards, with at most one non-monotone neighbor pair tolerated.
  bool v_shaped() const {
    int lo = min_index();
    int bad = 0;
    for (int i = 0; i + 1 < static_cast<int>(abs_error.size()); ++i) {
      bool ok = i < lo ? abs_error[i + 1] <= abs_error[i] : abs_error[i + 1] >= abs_error[i];
      bad += ok ? 0 : 1;
    }
    return bad <= 1;
  }

  void write_csv(std::ostream& os) const {
    os << "h,abs_error\n";
    char line[80];
    for (std::size_t i = 0; i < h.size(); ++i) {
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", h[i], abs_error[i]);
      os << line;
    }
  }
  void write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    write_csv(f);
  }
};

namespace detail {

inline void require_direction(const Eigen::VectorXd& d) {
  if (d.size() == 0 || d.lpNorm<Eigen::Infinity>() == 0.0)
    throw std::invalid_argument("direction vector must be nonzero");
}

}  // namespace detail

/// Central-difference check of the directional derivative of the objective
/// against the exact gradient.
template <CheckableProblem P>
CheckReport fd_check_gradient(const P& prob, const Eigen::VectorXd& p, const Eigen::VectorXd& d,
                              const std::vector<double>& h_list = default_h_sweep()) {
  detail::require_direction(d);
  CheckReport rep;
  rep.direction = d;
  rep.h = h_list;
  rep.exact = prob.gradient_p(p).dot(d);
  for (double h : h_list) {
    double fd = (prob.value_p(p + h * d) - prob.value_p(p - h * d)) / (2.0 * h);
    rep.abs_error.push_back(std::abs(rep.exact - fd));
  }
  rep.pass = rep.min_rel_error() <= 1e-5;
  return rep;
}

/// Second-order central-difference check of d^T H d against the exact
/// Hessian.
template <CheckableProblem P>
CheckReport fd_check_hessian(const P& prob, const Eigen::VectorXd& p, const Eigen::VectorXd& d,
                             const std::vector<double>& h_list = default_h_sweep()) {
  detail::require_direction(d);
  CheckReport rep;
  rep.direction = d;
  rep.h = h_list;
  rep.exact = d.dot(prob.hessian_p(p) * d);
  double j0 = prob.value_p(p);
  for (double h : h_list) {
    double fd = (prob.value_p(p + h * d) - 2.0 * j0 + prob.value_p(p - h * d)) / (h * h);
    rep.abs_error.push_back(std::abs(rep.exact - fd));
  }
  rep.pass = rep.min_rel_error() <= 1e-3;
  return rep;
}

/// First-order complex-step check: Im J(p + i h d) / h, which has no
/// subtractive cancellation and plateaus for small h.
template <CheckableProblem P>
CheckReport complex_step_gradient(const P& prob, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& d,
                                  const std::vector<double>& h_list = default_h_sweep()) {
  detail::require_direction(d);
  CheckReport rep;
  rep.direction = d;
  rep.h = h_list;
  rep.exact = prob.gradient_p(p).dot(d);
  for (double h : h_list) {
    Eigen::VectorXcd z = p.cast<std::complex<double>>() + std::complex<double>(0.0, h) *
                                                              d.cast<std::complex<double>>();
    double cs = prob.value_p_complex(z).imag() / h;
    rep.abs_error.push_back(std::abs(rep.exact - cs));
  }
  rep.pass = rep.min_rel_error() <= 1e-6;
  return rep;
}

/// Second-order complex-step check of d^T H d using probes along the
/// fractional powers of i, e^{i 60 deg} and e^{i 240 deg}:
///   2 Im[J(p + i^{2/3} h d) + J(p + i^{8/3} h d)] / (sqrt(3) h^2).
template <CheckableProblem P>
CheckReport complex_step_hessian(const P& prob, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& d,
                                 const std::vector<double>& h_list = default_h_sweep()) {
  detail::require_direction(d);
  const std::complex<double> w1 = std::polar(1.0, std::numbers::pi / 3.0);        // i^{2/3}
  const std::complex<double> w2 = std::polar(1.0, 4.0 * std::numbers::pi / 3.0);  // i^{8/3}
  CheckReport rep;
  rep.direction = d;
  rep.h = h_list;
  rep.exact = d.dot(prob.hessian_p(p) * d);
  Eigen::VectorXcd pc = p.cast<std::complex<double>>();
  Eigen::VectorXcd dc = d.cast<std::complex<double>>();
  for (double h : h_list) {
    std::complex<double> j1 = prob.value_p_complex(pc + (h * w1) * dc);
    std::complex<double> j2 = prob.value_p_complex(pc + (h * w2) * dc);
    double cs = 2.0 * (j1.imag() + j2.imag()) / (std::sqrt(3.0) * h * h);
    rep.abs_error.push_back(std::abs(rep.exact - cs));
  }
  rep.pass = rep.min_rel_error() <= 1e-4;
  return rep;
}

/// Column-by-column central difference of the exact gradient against the
/// assembled Hessian; the error at each step size is the largest entry of
/// the difference relative to the largest entry of the Hessian.
template <CheckableProblem P>
CheckReport fd_check_hessian_columns(const P& prob, const Eigen::VectorXd& p,
                                     const std::vector<double>& h_list = default_h_sweep()) {
  Eigen::MatrixXd hess = prob.hessian_p(p);
  double scale = hess.cwiseAbs().maxCoeff();
  CheckReport rep;
  rep.h = h_list;
  rep.exact = scale;
  for (double h : h_list) {
    Eigen::MatrixXd fd(hess.rows(), hess.cols());
    for (int j = 0; j < hess.cols(); ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(hess.cols(), j);
      fd.col(j) = (prob.gradient_p(p + h * e) - prob.gradient_p(p - h * e)) / (2.0 * h);
    }
    rep.abs_error.push_back((fd - hess).cwiseAbs().maxCoeff());
  }
  rep.pass = rep.min_rel_error() <= 1e-5;
  return rep;
}

}  // namespace mpcal
