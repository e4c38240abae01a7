#include <doctest.h>

#include <random>

#include "families.hpp"
#include "opid/errors.hpp"
#include "opid/matfun.hpp"

using namespace opid;
using namespace opid::testing;

TEST_CASE("linear family value and derivative") {
  const auto fn = make_family(linear_scalar());
  CHECK(eval_phi(fn, 0.5)(0, 0) == cplx(0.5));
  CHECK(eval_phi_deriv(fn, 0.5)(0, 0) == cplx(1.0));
  CHECK(eval_phi(fn, 1.0)(0, 0) == cplx(1.0));
  CHECK(eval_phi_deriv(fn, 0.13)(0, 0) == cplx(1.0));
}

TEST_CASE("zero family vanishes with its derivative") {
  MatrixFunctionSpec s;
  s.family = Family::zero;
  s.m1 = 2;
  s.m2 = 3;
  const auto fn = make_family(s);
  for (double x : {0.0, 0.4, 1.0}) {
    CHECK(eval_phi(fn, x).isZero(0.0));
    CHECK(eval_phi_deriv(fn, x).isZero(0.0));
    CHECK(eval_phi(fn, x).rows() == 3);
    CHECK(eval_phi(fn, x).cols() == 2);
  }
}

TEST_CASE("trig family at the origin") {
  auto s = scalar_spec(Family::trig, {1.0});
  s.omega = 2.0;
  const auto fn = make_family(s);
  CHECK(std::abs(eval_phi(fn, 0.0)(0, 0)) == 0.0);
  CHECK(eval_phi_deriv(fn, 0.0)(0, 0) == cplx(2.0));
}

TEST_CASE("constant family") {
  const auto fn = make_family(constant_scalar(0.4));
  CHECK(eval_phi(fn, 0.7)(0, 0) == cplx(0.4));
  CHECK(eval_phi_deriv(fn, 0.7)(0, 0) == cplx(0.0));
  CHECK(fn.at_origin()(0, 0) == cplx(0.4));
}

TEST_CASE("polynomial x^2 derivative") {
  const auto fn = make_family(scalar_spec(Family::polynomial, {0.0, 0.0, 1.0}));
  CHECK(eval_phi_deriv(fn, 0.5)(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_phi(fn, 0.5)(0, 0).real() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("fourier_random is deterministic in its seed") {
  const auto a = make_family(fourier(7, 2, 2));
  const auto b = make_family(fourier(7, 2, 2));
  const auto c = make_family(fourier(8, 2, 2));
  const MatrixXcd va = eval_phi(a, 0.3);
  CHECK(va == eval_phi(a, 0.3));
  CHECK(va == eval_phi(b, 0.3));
  CHECK(va != eval_phi(c, 0.3));
  // sin(k pi x / l) modes vanish at both ends
  CHECK(eval_phi(a, 0.0).norm() == 0.0);
  CHECK(eval_phi(a, 1.0).norm() < 1e-14);
}

TEST_CASE("offset and addends") {
  const auto trig = make_family(shifted_trig());
  CHECK(eval_phi(trig, 0.25)(0, 0).real() == doctest::Approx(0.4 + 0.3 * std::sin(0.5)));
  CHECK(eval_phi_deriv(trig, 0.25)(0, 0).real() == doctest::Approx(0.6 * std::cos(0.5)));
  const auto rect = make_family(rectangular());
  const MatrixXcd v = eval_phi(rect, 0.5);
  CHECK(v.rows() == 1);
  CHECK(v.cols() == 2);
  CHECK(v(0, 0).real() == doctest::Approx(0.5));
  CHECK(v(0, 1).real() == doctest::Approx(0.3 * std::sin(0.5)));
}

TEST_CASE("derivative matches central differences on every family") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.01, 0.99);
  for (const auto& [name, spec] : builtin_families()) {
    CAPTURE(name);
    const auto fn = make_family(spec);
    for (int k = 0; k < 32; ++k) {
      const double x = unif(rng);
      const double d = 1e-5;
      const MatrixXcd fd = (eval_phi(fn, x + d) - eval_phi(fn, x - d)) / (2 * d);
      const MatrixXcd exact = eval_phi_deriv(fn, x);
      CHECK((fd - exact).norm() <= 1e-7 * std::max(1.0, exact.norm()));
    }
  }
}

TEST_CASE("domain errors") {
  const auto fn = make_family(linear_scalar());
  CHECK_THROWS_AS(eval_phi(fn, -0.1), DomainError);
  CHECK_THROWS_AS(eval_phi(fn, 1.1), DomainError);
  CHECK_THROWS_AS(eval_phi_deriv(fn, 1.5), DomainError);
  CHECK_NOTHROW(eval_phi(fn, 1.0));
}

TEST_CASE("invalid specs") {
  MatrixFunctionSpec s;
  s.family = Family::linear;
  CHECK_THROWS_AS(make_family(s), InvalidSpec);  // no coefficient
  s.coefficients = {MatrixXcd::Ones(2, 2)};
  CHECK_THROWS_AS(make_family(s), InvalidSpec);  // shape does not match m2 x m1
  auto f = fourier(1);
  f.coefficients = {MatrixXcd::Ones(1, 1)};
  CHECK_THROWS_AS(make_family(f), InvalidSpec);
  auto z = linear_scalar();
  z.m2 = 0;
  CHECK_THROWS_AS(make_family(z), InvalidSpec);
  CHECK_THROWS_AS(family_from_string("bessel"), InvalidSpec);
}

TEST_CASE("family names round-trip") {
  for (auto f : {Family::zero, Family::constant, Family::linear, Family::trig, Family::polynomial,
                 Family::fourier_random})
    CHECK(family_from_string(to_string(f)) == f);
}
