#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpcal/problem.hpp"

namespace mpcal {

template <class P>
concept OptimizableProblem = requires(const P& p, const Eigen::VectorXd& x) {
  { p.evaluate(x, true) } -> std::convertible_to<ProblemEval>;
  { p.value(x) } -> std::convertible_to<double>;
};

struct GaSettings {
  int population = 25;
  int parents = 8;
  int children = 8;
  int fresh = 9;
  int generations = 4;
  double mutation_rate = 0.1;
  std::uint64_t seed = 0;
};

struct OptSettings {
  double tol_grad_inf = 1e-4;  // termination on the raw-parameter-space gradient
  int max_iterations = 200;
  int lbfgs_memory = 10;
  double hessian_floor = 1e-8;  // eigenvalue floor, relative to the largest magnitude
  int max_backtracks = 30;
  Eigen::VectorXd lower, upper;  // optimization-space box; empty means unbounded
  GaSettings ga{};
};

struct TraceRow {
  int iteration = 0;
  double log10_j = 0.0;
  double grad_inf = 0.0;                                      // raw-parameter space
  double cond_h = std::numeric_limits<double>::quiet_NaN();   // Newton only
  long long solves = 0;                                       // cumulative
  Eigen::VectorXd params;                                     // raw parameter values
};

struct OptTrace {
  std::string optimizer;
  std::vector<TraceRow> rows;  // one per iteration, including iteration 0
  bool converged = false;
  double seconds = 0.0;

  int iterations() const { return static_cast<int>(rows.size()) - 1; }
};

/// Total linear system solutions accumulated over an optimizer run.
inline long long count_solves(const OptTrace& trace) {
  return trace.rows.empty() ? 0 : trace.rows.back().solves;
}

namespace detail {

template <class P>
long long problem_solves(const P& p) {
  if constexpr (requires { p.solve_count(); })
    return p.solve_count();
  else
    return 0;
}

template <class P>
Eigen::VectorXd problem_trace_params(const P& p, const Eigen::VectorXd& x) {
  if constexpr (requires { p.trace_params(x); })
    return p.trace_params(x);
  else
    return x;
}

inline Eigen::VectorXd clamp_box(Eigen::VectorXd x, const OptSettings& s) {
  if (s.lower.size() == x.size()) x = x.cwiseMax(s.lower);
  if (s.upper.size() == x.size()) x = x.cwiseMin(s.upper);
  return x;
}

inline double cond_from_eigenvalues(const Eigen::VectorXd& lam) {
  double hi = lam.cwiseAbs().maxCoeff();
  double lo = lam.cwiseAbs().minCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

template <class P>
void push_row(OptTrace& trace, const P& prob, int iter, const Eigen::VectorXd& x,
              const ProblemEval& ev, double cond_h) {
  TraceRow row;
  row.iteration = iter;
  row.log10_j = std::log10(ev.value);
  row.grad_inf = ev.report_grad.lpNorm<Eigen::Infinity>();
  row.cond_h = cond_h;
  row.solves = problem_solves(prob);
  row.params = problem_trace_params(prob, x);
  trace.rows.push_back(std::move(row));
}

}  // namespace detail

/// Newton-Raphson with an eigenvalue-floor safeguard for indefinite Hessians
/// and backtracking until the objective decreases. Iterates are projected
/// onto the box after each trial step. Terminates when the infinity norm of
/// the raw-parameter gradient drops below the tolerance.
template <OptimizableProblem P>
std::pair<Eigen::VectorXd, OptTrace> newton_solve(const P& prob, Eigen::VectorXd x,
                                                  const OptSettings& s = {}) {
  auto t0 = std::chrono::steady_clock::now();
  OptTrace trace;
  trace.optimizer = "newton";

  x = detail::clamp_box(std::move(x), s);
  ProblemEval ev = prob.evaluate(x, true);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ev.hess);
  detail::push_row(trace, prob, 0, x, ev, detail::cond_from_eigenvalues(es.eigenvalues()));

  for (int it = 1; it <= s.max_iterations; ++it) {
    if (ev.report_grad.lpNorm<Eigen::Infinity>() < s.tol_grad_inf) {
      trace.converged = true;
      break;
    }

    Eigen::VectorXd lam = es.eigenvalues();
    double floor = std::max(s.hessian_floor * lam.cwiseAbs().maxCoeff(),
                            std::numeric_limits<double>::min());
    Eigen::VectorXd inv_lam(lam.size());
    for (int i = 0; i < lam.size(); ++i) inv_lam[i] = 1.0 / std::max(lam[i], floor);
    Eigen::VectorXd step =
        -(es.eigenvectors() * inv_lam.asDiagonal() * es.eigenvectors().transpose() * ev.grad);

    double t = 1.0;
    Eigen::VectorXd xn;
    double jn = std::numeric_limits<double>::infinity();
    for (int bt = 0; bt <= s.max_backtracks; ++bt) {
      xn = detail::clamp_box(x + t * step, s);
      jn = prob.value(xn);
      if (jn < ev.value) break;
      t *= 0.5;
    }
    if (!(jn < ev.value)) break;  // no decrease found; report the last iterate

    x = std::move(xn);
    ev = prob.evaluate(x, true);
    es.compute(ev.hess);
    detail::push_row(trace, prob, it, x, ev, detail::cond_from_eigenvalues(es.eigenvalues()));
    if (ev.report_grad.lpNorm<Eigen::Infinity>() < s.tol_grad_inf) trace.converged = true;
  }

  trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {x, trace};
}

/// Projected limited-memory BFGS using only objective and gradient values.
/// The two-loop recursion builds the search direction; steps backtrack with
/// an Armijo test on the box-projected point. Same termination criterion as
/// the Newton solver.
template <OptimizableProblem P>
std::pair<Eigen::VectorXd, OptTrace> quasi_newton_solve(const P& prob, Eigen::VectorXd x,
                                                        const OptSettings& s = {}) {
  auto t0 = std::chrono::steady_clock::now();
  OptTrace trace;
  trace.optimizer = "lbfgs";

  x = detail::clamp_box(std::move(x), s);
  ProblemEval ev = prob.evaluate(x, false);
  detail::push_row(trace, prob, 0, x, ev, std::numeric_limits<double>::quiet_NaN());

  struct Pair {
    Eigen::VectorXd s, y;
    double rho;
  };
  std::deque<Pair> mem;

  for (int it = 1; it <= s.max_iterations; ++it) {
    if (ev.report_grad.lpNorm<Eigen::Infinity>() < s.tol_grad_inf) {
      trace.converged = true;
      break;
    }

    // two-loop recursion
    Eigen::VectorXd q = ev.grad;
    std::vector<double> alpha(mem.size());
    for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
      alpha[i] = mem[i].rho * mem[i].s.dot(q);
      q -= alpha[i] * mem[i].y;
    }
    if (!mem.empty()) {
      const Pair& last = mem.back();
      q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < mem.size(); ++i) {
      double beta = mem[i].rho * mem[i].y.dot(q);
      q += (alpha[i] - beta) * mem[i].s;
    }
    Eigen::VectorXd dir = -q;
    if (dir.dot(ev.grad) >= 0.0) dir = -ev.grad;  // fallback to steepest descent

    constexpr double c1 = 1e-4;
    double t = 1.0;
    Eigen::VectorXd xn;
    double jn = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt <= s.max_backtracks; ++bt) {
      xn = detail::clamp_box(x + t * dir, s);
      jn = prob.value(xn);
      if (jn <= ev.value + c1 * ev.grad.dot(xn - x)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    ProblemEval evn = prob.evaluate(xn, false);
    Eigen::VectorXd sk = xn - x;
    Eigen::VectorXd yk = evn.grad - ev.grad;
    double sy = sk.dot(yk);
    if (sy > 1e-12 * sk.norm() * yk.norm()) {
      mem.push_back({sk, yk, 1.0 / sy});
      if (static_cast<int>(mem.size()) > s.lbfgs_memory) mem.pop_front();
    }

    x = std::move(xn);
    ev = std::move(evn);
    detail::push_row(trace, prob, it, x, ev, std::numeric_limits<double>::quiet_NaN());
    if (ev.report_grad.lpNorm<Eigen::Infinity>() < s.tol_grad_inf) trace.converged = true;
  }

  trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {x, trace};
}

/// Genetic initial-guess search in raw parameter space. Every generation
/// ranks the whole population by objective value, keeps the lowest-cost
/// chromosomes as parents, breeds children by per-gene blend crossover with
/// uniform mutation, and tops the population up with fresh random
/// chromosomes. A chromosome whose forward solve fails gets infinite cost
/// and drops out in the ranking. Returns the best chromosome of the final
/// generation.
template <class P>
Eigen::VectorXd ga_initialize(const P& prob, const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper, const GaSettings& ga,
                              long long* objective_evals = nullptr) {
  const int dim = static_cast<int>(lower.size());
  std::mt19937_64 rng(ga.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto random_chromosome = [&] {
    Eigen::VectorXd p(dim);
    for (int i = 0; i < dim; ++i) p[i] = lower[i] + unit(rng) * (upper[i] - lower[i]);
    return p;
  };
  auto cost = [&](const Eigen::VectorXd& p) {
    try {
      return prob.value_p(p);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  struct Chromosome {
    Eigen::VectorXd p;
    double cost;
  };
  std::vector<Chromosome> pop(ga.population);
  for (auto& c : pop) c.p = random_chromosome();

  for (int gen = 1; gen <= ga.generations; ++gen) {
    for (auto& c : pop) {
      c.cost = cost(c.p);
      if (objective_evals) ++*objective_evals;
    }
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Chromosome& a, const Chromosome& b) { return a.cost < b.cost; });
    if (gen == ga.generations) break;

    std::vector<Chromosome> next(pop.begin(), pop.begin() + ga.parents);
    std::uniform_int_distribution<int> pick(0, ga.parents - 1);
    for (int c = 0; c < ga.children; ++c) {
      int a = pick(rng);
      int b = pick(rng);
      while (b == a) b = pick(rng);
      Eigen::VectorXd child(dim);
      for (int g = 0; g < dim; ++g) {
        double beta = unit(rng);
        child[g] = beta * next[a].p[g] + (1.0 - beta) * next[b].p[g];
        if (unit(rng) < ga.mutation_rate)
          child[g] = lower[g] + unit(rng) * (upper[g] - lower[g]);
      }
      next.push_back({std::move(child), 0.0});
    }
    for (int f = 0; f < ga.fresh; ++f) next.push_back({random_chromosome(), 0.0});
    pop = std::move(next);
  }
  return pop.front().p;
}

}  // namespace mpcal
