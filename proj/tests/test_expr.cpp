#include <doctest.h>

#include "cpair/expr.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace cpair;

namespace {

std::vector<double> random_point(oracle::Rng& rng, int n, double scale = 2.0) {
  std::vector<double> p(n);
  for (double& x : p) x = rng.uniform(-scale, scale);
  return p;
}

const char* const kSmooth[] = {
    "x0*sin(x1)",
    "cos(x0)^3 - 2*x1*x2",
    "exp(sin(x0) - x2) / (2 + cos(x1))",
    "-x0^2 + pi*x1 - 3.5e-1",
    "(x0 + x1*x2)^4 / (3 + x0^2)",
    "sin(cos(exp(x2 / 4)))*x1 - -x0",
};

}  // namespace

TEST_CASE("parse and evaluate") {
  const double origin[3] = {0, 0, 0};
  CHECK(parse("cos(x0)", 3).eval(origin) == 1.0);
  const double ones[2] = {1, 1};
  CHECK(parse("x0*x1 + 2^3", 2).eval(ones) == 9.0);
  CHECK(parse("pi", 0).eval({}) == std::numbers::pi);
  CHECK(parse("2 - 3 - 4", 0).eval({}) == -5.0);
  CHECK(parse("8 / 4 / 2", 0).eval({}) == 1.0);
  CHECK(parse("-2^2", 0).eval({}) == -4.0);
  CHECK(parse("2*-3", 0).eval({}) == -6.0);
  CHECK(parse("(1 + 2) * 3", 0).eval({}) == 9.0);
  CHECK(parse("  1.5e1 ", 0).eval({}) == 15.0);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("x5", 3);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 0);
    CHECK(e.detail().find("out of range") != std::string::npos);
  }
  try {
    parse("x0 + foo(x1)", 2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
    CHECK(e.detail().find("unknown identifier") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("x0 +", 1), ParseError);
  CHECK_THROWS_AS(parse("(x0", 1), ParseError);
  CHECK_THROWS_AS(parse("x0^1.5", 1), ParseError);
  CHECK_THROWS_AS(parse("x0^-1", 1), ParseError);
  CHECK_THROWS_AS(parse("x0 x1", 2), ParseError);
  CHECK_THROWS_AS(parse("sin x0", 1), ParseError);
}

TEST_CASE("evaluation errors are explicit") {
  const double zero[1] = {0.0};
  CHECK_THROWS_AS(parse("1/x0", 1).eval(zero), EvalError);
  CHECK_THROWS_AS(parse("exp(1000)", 0).eval({}), EvalError);
  CHECK_THROWS(parse("x0", 1).eval(std::vector<double>{1.0, 2.0}));

  oracle::Rng rng(3);
  const Expr e = parse("sin(x0)^2 + cos(x0)^2", 1);
  for (int i = 0; i < 100; ++i) {
    const double p[1] = {rng.uniform(-50, 50)};
    CHECK(std::abs(e.eval(p) - 1.0) < 1e-15 + 1e-15);
  }
}

TEST_CASE("symbolic partials") {
  oracle::Rng rng(4);
  const Expr e = parse("x0*sin(x1)", 2);
  const Expr expected = parse("x0*cos(x1)", 2);
  const Expr d = e.partial(1);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_point(rng, 2);
    CHECK(std::abs(d.eval(p) - expected.eval(p)) < 1e-12);
  }
  CHECK(parse("3.25 + pi", 3).partial(2).is_zero());
  CHECK_THROWS(e.partial(2));
}

TEST_CASE("partials match the central-difference oracle") {
  oracle::Rng rng(5);
  const double h = 1e-5;
  for (const char* text : kSmooth) {
    const Expr e = parse(text, 3);
    for (int axis = 0; axis < 3; ++axis) {
      const Expr d = e.partial(axis);
      for (int trial = 0; trial < 30; ++trial) {
        auto p = random_point(rng, 3, 1.0);
        auto plus = p, minus = p;
        plus[axis] += h;
        minus[axis] -= h;
        const double fd = (e.eval(plus) - e.eval(minus)) / (2 * h);
        CHECK(std::abs(d.eval(p) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("mixed partials commute") {
  oracle::Rng rng(6);
  for (const char* text : kSmooth) {
    const Expr e = parse(text, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const Expr a = e.partial(i).partial(j), b = e.partial(j).partial(i);
        for (int trial = 0; trial < 10; ++trial) {
          const auto p = random_point(rng, 3, 1.0);
          CHECK(std::abs(a.eval(p) - b.eval(p)) < 1e-10 * std::max(1.0, std::abs(a.eval(p))));
        }
      }
  }
}

TEST_CASE("printing round-trips semantically") {
  oracle::Rng rng(7);
  for (const char* text : kSmooth) {
    const Expr e = parse(text, 3);
    const Expr back = parse(e.to_string(), 3);
    const Expr dback = parse(e.partial(0).to_string(), 3);
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = random_point(rng, 3, 1.0);
      CHECK(back.eval(p) == e.eval(p));
      CHECK(dback.eval(p) == doctest::Approx(e.partial(0).eval(p)).epsilon(1e-14));
    }
  }
}

TEST_CASE("shifting variables re-embeds an expression") {
  const Expr e = parse("x0*cos(x2)", 3);
  const Expr s = e.shifted(3, 6);
  CHECK(s.dim() == 6);
  CHECK(s.uses_variable(3));
  CHECK(s.uses_variable(5));
  CHECK_FALSE(s.uses_variable(0));
  const double p[6] = {9, 9, 9, 2.0, 9, 0.5};
  const double q[3] = {2.0, 9, 0.5};
  CHECK(s.eval(p) == e.eval(q));
}
