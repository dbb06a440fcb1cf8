#include "doctest.h"

#include <cmath>

#include "wahm/error.hpp"
#include "wahm/expr.hpp"

using namespace wahm;

TEST_CASE("parse and evaluate") {
  const Point p{0.3, -0.7, 0};
  CHECK(Expr::parse("1 + 2 * 3")(p) == doctest::Approx(7));
  CHECK(Expr::parse("-2^2")(p) == doctest::Approx(-4));
  CHECK(Expr::parse("2^3^2")(p) == doctest::Approx(512));
  CHECK(Expr::parse("x*(1-x)*y")(p) == doctest::Approx(0.3 * 0.7 * -0.7));
  CHECK(Expr::parse("atan(25*(x-y))")(p) == doctest::Approx(std::atan(25.0)));
  CHECK(Expr::parse("exp(-((x-0.5)^2+(y-0.5)^2)/(2*0.1^2))")(p) ==
        doctest::Approx(std::exp(-(0.04 + 1.44) / 0.02)));
  CHECK(Expr::parse("sqrt(4) + sin(pi/2) + cos(0)")(p) == doctest::Approx(4));
  CHECK_THROWS_AS(Expr::parse("1 +"), Error);
  CHECK_THROWS_AS(Expr::parse("foo(x)"), Error);
  CHECK_THROWS_AS(Expr::parse("(x"), Error);
  CHECK_THROWS_AS(Expr::parse("x y"), Error);
  CHECK(Expr()(p) == 0.0);
}

TEST_CASE("symbolic derivatives match finite differences") {
  const char* cases[] = {"atan(25*(x-y))", "exp(-((x-0.5)^2+(y-0.5)^2)/(2*0.1^2))", "x^3*y - sin(x*y)/(1+x^2)",
                         "sqrt(1+x^2+y^2)", "x^y"};
  const double h = 1e-5;
  for (const char* c : cases) {
    const Expr f = Expr::parse(c);
    for (const Point x : {Point{0.3, 0.4, 0}, Point{0.71, 0.69, 0}}) {
      for (int axis = 0; axis < 2; ++axis) {
        Point xp = x, xm = x;
        xp[axis] += h;
        xm[axis] -= h;
        const double fd = (f(xp) - f(xm)) / (2 * h);
        CHECK(f.diff(axis)(x) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("mixed derivatives of a polynomial") {
  const Expr f = Expr::parse("x^4*y^2 + 3*x*y");
  const Point x{0.5, 2.0, 0};
  CHECK(f.derivative({2, 1, 0})(x) == doctest::Approx(12 * 0.25 * 2 * 2.0));
  CHECK(f.derivative({5, 0, 0})(x) == doctest::Approx(0.0));
  CHECK(f.derivative({5, 0, 0}).is_constant());
}
