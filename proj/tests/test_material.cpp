#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mpcal/material.hpp"

using namespace mpcal;
using Catch::Approx;

namespace {

Material<double> mat(double E, double nu, double Y = 200, double K = 0, double S = 200,
                     double D = 20) {
  Material<double> m;
  m.E = E;
  m.nu = nu;
  m.Y = Y;
  m.K = K;
  m.S = S;
  m.D = D;
  return m;
}

SymTensor<double> random_sym(std::mt19937_64& rng, double scale = 300.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymTensor<double> t;
  for (auto& x : t.c) x = u(rng);
  return t;
}

}  // namespace

TEST_CASE("Lame constants from E and nu", "[material]") {
  auto m = mat(70000.0, 0.3);
  CHECK(m.lambda() == Approx(40384.615384615).epsilon(1e-10));
  CHECK(m.mu() == Approx(26923.076923077).epsilon(1e-10));
}

TEST_CASE("elastic stress of zero strain is zero", "[material]") {
  auto m = mat(70000.0, 0.3);
  auto sig = elastic_stress(SymTensor<double>::zero(), m);
  for (double c : sig.c) CHECK(c == 0.0);
}

TEST_CASE("elastic stress of a uniaxial strain", "[material]") {
  auto m = mat(70000.0, 0.3);
  auto sig = elastic_stress(SymTensor<double>::diag(0.001, 0.0, 0.0), m);
  CHECK(sig.c[0] == Approx(94.2308).epsilon(1e-5));
  CHECK(sig.c[1] == Approx(40.3846).epsilon(1e-5));
  CHECK(sig.c[2] == Approx(40.3846).epsilon(1e-5));
  CHECK(sig.c[3] == 0.0);
}

TEST_CASE("isotropic strain gives isotropic stress", "[material]") {
  auto m = mat(70000.0, 0.3);
  double c = 3.4e-3;
  auto sig = elastic_stress(SymTensor<double>::identity() * c, m);
  double expected = (3.0 * m.lambda() + 2.0 * m.mu()) * c;
  CHECK(sig.c[0] == Approx(expected));
  CHECK(sig.c[1] == Approx(expected));
  CHECK(sig.c[2] == Approx(expected));
}

TEST_CASE("hardening curve", "[material]") {
  auto m = mat(70000.0, 0.3, 200.0, 0.0, 200.0, 20.0);
  CHECK(hardening(0.0, m) == 0.0);
  CHECK(hardening(0.1, m) == Approx(172.9329).epsilon(1e-6));

  auto lin = mat(70000.0, 0.3, 200.0, 1000.0, 0.0, 0.0);
  CHECK(hardening(0.01, lin) == Approx(10.0));

  // monotone non-decreasing for non-negative moduli
  double prev = 0.0;
  for (int i = 1; i <= 40; ++i) {
    double h = hardening(i * 0.005, m);
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("von Mises effective stress", "[material]") {
  CHECK(effective_stress(SymTensor<double>::diag(200.0, 0.0, 0.0)) == Approx(200.0));
  CHECK(effective_stress(SymTensor<double>::identity() * 137.0) == Approx(0.0).margin(1e-10));

  SymTensor<double> shear;
  shear.c[SymTensor<double>::k12] = 45.0;
  CHECK(effective_stress(shear) == Approx(std::sqrt(3.0) * 45.0));
}

TEST_CASE("effective stress is invariant under hydrostatic shifts", "[material]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-500.0, 500.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto sig = random_sym(rng);
    double c = u(rng);
    auto shifted = sig + SymTensor<double>::identity() * c;
    CHECK(effective_stress(shifted) == Approx(effective_stress(sig)).margin(1e-9));
  }
}

TEST_CASE("yield value", "[material]") {
  auto m = mat(70000.0, 0.3, 200.0, 0.0, 200.0, 20.0);
  CHECK(yield_value(SymTensor<double>::diag(200.0, 0.0, 0.0), 0.0, m) == Approx(0.0).margin(1e-12));
  CHECK(yield_value(SymTensor<double>::zero(), 0.0, m) == Approx(-200.0));
  CHECK(yield_value(SymTensor<double>::diag(300.0, 0.0, 0.0), 0.1, m) ==
        Approx(-72.9329).epsilon(1e-6));
}

TEST_CASE("flow normal of a uniaxial stress", "[material]") {
  auto n = flow_normal(SymTensor<double>::diag(200.0, 0.0, 0.0));
  CHECK(n.c[0] == Approx(1.0));
  CHECK(n.c[1] == Approx(-0.5));
  CHECK(n.c[2] == Approx(-0.5));
}

TEST_CASE("flow normal rejects hydrostatic states", "[material]") {
  CHECK_THROWS_AS(flow_normal(SymTensor<double>::identity() * 100.0), DegenerateDeviatorError);
  CHECK_THROWS_AS(flow_normal(SymTensor<double>::zero()), DegenerateDeviatorError);
}

TEST_CASE("flow normal identities", "[material]") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto sig = random_sym(rng);
    auto n = flow_normal(sig);
    CHECK(n.trace() == Approx(0.0).margin(1e-12));
    CHECK(ddot(n, n) == Approx(1.5).epsilon(1e-12));
    // consistency with the effective-stress gradient
    auto s = sig.deviator();
    CHECK(ddot(n, s) == Approx(std::sqrt(1.5) * norm(s)).epsilon(1e-12));
  }
}

TEST_CASE("parameter set bookkeeping", "[material]") {
  ParamSet ps(70000.0, 0.3, 220.0, 0.0, 220.0, 22.0);
  ps.set_active(Param::Y);
  ps.set_active(Param::S);
  ps.set_active(Param::D);
  CHECK(ps.n_active() == 3);
  CHECK(ps.active_values().isApprox(Eigen::Vector3d(220.0, 220.0, 22.0)));
  CHECK(ps.active_ref().isApprox(Eigen::Vector3d(220.0, 220.0, 22.0)));
  CHECK(ps.spec(Param::Y).lower == Approx(0.22));
  CHECK(ps.spec(Param::Y).upper == Approx(220000.0));

  ParamSet moved = ps.with_active_values(Eigen::Vector3d(200.0, 200.0, 20.0));
  CHECK(moved.value(Param::Y) == 200.0);
  CHECK(moved.value(Param::S) == 200.0);
  CHECK(moved.value(Param::D) == 20.0);
  CHECK(moved.value(Param::E) == 70000.0);
  CHECK_NOTHROW(moved.validate());

  ParamSet bad = ps;
  bad.set_value(Param::E, -1.0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  ParamSet bad_nu = ps;
  bad_nu.set_value(Param::Nu, 0.5);
  CHECK_THROWS_AS(bad_nu.validate(), std::invalid_argument);
}
