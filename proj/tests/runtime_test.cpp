#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "sl/diagnostics.hpp"
#include "sl/runtime.hpp"

using namespace sl;

TEST_CASE("tape stacks are LIFO with copy semantics") {
  TapeStacks t;
  t.push_scalar(3.5);
  CHECK(t.pop_scalar() == 3.5);

  Vector v{1.0, 2.0};
  t.push_vector(v);
  v[0] = 9.0;
  CHECK(t.pop_vector() == Vector{1.0, 2.0});

  t.push_control(1);
  t.push_control(7);
  CHECK(t.pop_control() == 7);
  CHECK(t.pop_control() == 1);
  CHECK(t.empty());
  CHECK(t.push_count() == 4);
}

TEST_CASE("pop on an empty stack is an error") {
  TapeStacks t;
  CHECK_THROWS_AS(t.pop_control(), RuntimeError);
  CHECK_THROWS_AS(t.pop_scalar(), RuntimeError);
  CHECK_THROWS_AS(t.pop_vector(), RuntimeError);
}

TEST_CASE("gt0") {
  CHECK(gt0(2.0) == 2.0);
  CHECK(gt0(-1.0) == 0.0);
  CHECK(gt0(0.0) == 0.0);
}

TEST_CASE("smoothed derivative of gt0") {
  SmoothingConfig cfg{1e-3};
  CHECK(d_gt0(-0.01, cfg) == 0.0);
  CHECK(d_gt0(0.01, cfg) == 1.0);
  CHECK(d_gt0(0.0, cfg) == 0.5);
  // sigmoid at +-1 in units of h
  CHECK(d_gt0(1e-3, cfg) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  CHECK(d_gt0(-1e-3, cfg) == doctest::Approx(0.2689414213699951).epsilon(1e-15));
  CHECK(d_gt0(0.5, SmoothingConfig{1.0}) > 0.5);
}

TEST_CASE("derivative of exp") {
  CHECK(d_exp(0.0) == 1.0);
  CHECK(d_exp(1.0) == doctest::Approx(2.718281828459045).epsilon(1e-15));
  double h = 1e-5;
  CHECK(d_exp(0.3) == doctest::Approx((std::exp(0.3 + h) - std::exp(0.3 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("smoothing configuration") {
  CHECK_THROWS(validate(SmoothingConfig{0.0}));
  CHECK_THROWS(validate(SmoothingConfig{-1.0}));
  ::setenv("SL_SMOOTH_H", "0.01", 1);
  CHECK(smoothing_from_env().h == 0.01);
  ::setenv("SL_SMOOTH_H", "abc", 1);
  CHECK_THROWS(smoothing_from_env());
  ::unsetenv("SL_SMOOTH_H");
  CHECK(smoothing_from_env().h == 1e-3);
}
