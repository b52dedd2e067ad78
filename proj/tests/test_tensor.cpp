#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mpcal/tensor.hpp"

using namespace mpcal;
using Catch::Approx;

namespace {

SymTensor<double> random_sym(std::mt19937_64& rng, double scale = 100.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymTensor<double> t;
  for (auto& x : t.c) x = u(rng);
  return t;
}

}  // namespace

TEST_CASE("trace and deviator", "[tensor]") {
  SymTensor<double> t = SymTensor<double>::diag(3.0, 5.0, -2.0);
  t.c[SymTensor<double>::k12] = 1.5;
  CHECK(t.trace() == Approx(6.0));
  CHECK(t.deviator().trace() == Approx(0.0).margin(1e-14));
  CHECK(t.deviator().c[SymTensor<double>::k12] == Approx(1.5));
}

TEST_CASE("double contraction counts off-diagonals twice", "[tensor]") {
  SymTensor<double> t;
  t.c[SymTensor<double>::k12] = 2.0;
  CHECK(ddot(t, t) == Approx(8.0));
  CHECK(norm(t) == Approx(std::sqrt(8.0)));

  SymTensor<double> d = SymTensor<double>::diag(1.0, 2.0, 3.0);
  CHECK(ddot(d, d) == Approx(14.0));
}

TEST_CASE("norm is non-negative and matches the Frobenius norm", "[tensor]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    SymTensor<double> t = random_sym(rng);
    // full 3x3 reconstruction
    double m[3][3] = {{t.c[0], t.c[3], t.c[4]}, {t.c[3], t.c[1], t.c[5]}, {t.c[4], t.c[5], t.c[2]}};
    double frob = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) frob += m[i][j] * m[i][j];
    CHECK(norm(t) >= 0.0);
    CHECK(norm(t) == Approx(std::sqrt(frob)));
  }
}

TEST_CASE("identity and arithmetic", "[tensor]") {
  auto eye = SymTensor<double>::identity();
  CHECK(eye.trace() == Approx(3.0));
  auto two = eye * 2.0;
  CHECK((two - eye).trace() == Approx(3.0));
  CHECK((two + eye).c[0] == Approx(3.0));
}
