#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "mpcal/model.hpp"

using namespace mpcal;
using Catch::Approx;

namespace {

Material<double> default_mat() {
  Material<double> m;
  m.E = 70000.0;
  m.nu = 0.3;
  m.Y = 200.0;
  m.K = 0.0;
  m.S = 200.0;
  m.D = 20.0;
  return m;
}

}  // namespace

TEST_CASE("state dimensions per variant", "[model]") {
  CHECK(state_dim(ModelVariant::ThreeD) == 6);
  CHECK(state_dim(ModelVariant::PlaneStress) == 7);
  CHECK(state_dim(ModelVariant::Uniaxial) == 8);
}

TEST_CASE("plastic strain reconstruction is trace-free", "[model]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xi(8);
    for (auto& x : xi) x = u(rng);
    auto ep = plastic_strain<double>(xi);
    CHECK(ep.trace() == 0.0);  // exact by construction
    CHECK(ep.c[SymTensor<double>::k11] == xi[0]);
    CHECK(ep.c[SymTensor<double>::k12] == xi[1]);
    CHECK(ep.c[SymTensor<double>::k22] == xi[3]);
  }
}

TEST_CASE("unloaded elastic state has zero residual", "[model]") {
  auto m = default_mat();
  for (auto v : {ModelVariant::ThreeD, ModelVariant::PlaneStress, ModelVariant::Uniaxial}) {
    std::vector<double> xi(state_dim(v), 0.0), prev(state_dim(v), 0.0);
    auto r = local_residual<double>(v, Branch::Elastic, xi, prev, SymTensor<double>::zero(), m);
    for (double x : r) CHECK(x == Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("elastic alpha row is a plain difference", "[model]") {
  auto m = default_mat();
  std::vector<double> xi(6, 0.0), prev(6, 0.0);
  xi[kAlpha] = 0.01;
  auto r = local_residual<double>(ModelVariant::ThreeD, Branch::Elastic, xi, prev,
                                  SymTensor<double>::zero(), m);
  CHECK(r[kAlpha] == Approx(0.01));
}

TEST_CASE("uniaxial elastic off-axis rows vanish at the closed-form stretches", "[model]") {
  auto m = default_mat();
  double e11 = 0.001;
  std::vector<double> xi(8, 0.0), prev(8, 0.0);
  xi[6] = -m.nu * e11;
  xi[7] = -m.nu * e11;
  SymTensor<double> eps;
  eps.c[SymTensor<double>::k11] = e11;
  auto r = local_residual<double>(ModelVariant::Uniaxial, Branch::Elastic, xi, prev, eps, m);
  CHECK(r[6] == Approx(0.0).margin(1e-10));
  CHECK(r[7] == Approx(0.0).margin(1e-10));
}

TEST_CASE("plane stress constraint row equals the normal stress", "[model]") {
  auto m = default_mat();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.005, 0.005);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xi(7), prev(7, 0.0);
    for (auto& x : xi) x = u(rng);
    xi[kAlpha] = std::abs(xi[kAlpha]);
    SymTensor<double> eps;
    eps.c[SymTensor<double>::k11] = u(rng);
    eps.c[SymTensor<double>::k22] = u(rng);
    eps.c[SymTensor<double>::k12] = u(rng);
    auto r = local_residual<double>(ModelVariant::PlaneStress, Branch::Elastic, xi, prev, eps, m);
    auto sig = stress_at_state<double>(ModelVariant::PlaneStress, xi, eps, m);
    CHECK(r[6] == Approx(sig.c[SymTensor<double>::k33]).margin(1e-9));
  }
}

TEST_CASE("plastic rows reconstruct to a trace-free tensor", "[model]") {
  auto m = default_mat();
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-0.004, 0.004);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xi(6), prev(6);
    for (auto& x : xi) x = u(rng);
    for (auto& x : prev) x = u(rng);
    xi[kAlpha] = 0.01 + std::abs(xi[kAlpha]);
    prev[kAlpha] = 0.005;
    SymTensor<double> eps;
    eps.c[SymTensor<double>::k11] = 0.01 + u(rng);  // well away from hydrostatic states
    eps.c[SymTensor<double>::k12] = u(rng);
    auto r = local_residual<double>(ModelVariant::ThreeD, Branch::Plastic, xi, prev, eps, m);
    // rows are eps_p difference minus dalpha * n; both pieces are trace-free,
    // so the implied 33 row equals -(row11 + row22)
    SymTensor<double> full;
    for (int k = 0; k < 5; ++k) full.c[kPlasticVoigt[k]] = r[k];
    double r33 = -(r[0] + r[3]);
    full.c[SymTensor<double>::k33] = r33;
    CHECK(full.trace() == Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("residual size checking", "[model]") {
  auto m = default_mat();
  std::vector<double> xi(6, 0.0), prev(6, 0.0);
  CHECK_THROWS_AS(local_residual<double>(ModelVariant::PlaneStress, Branch::Elastic, xi, prev,
                                         SymTensor<double>::zero(), m),
                  std::invalid_argument);
}
