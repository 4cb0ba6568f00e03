#include <doctest.h>

#include "cdii/expr.hpp"
#include "cdii/grid.hpp"

#include <cmath>
#include <string>

using namespace cdii;

namespace {

double ev(const std::string& s, double x = 0.0, double y = 0.0) {
    return Expr::parse(s).eval(x, y);
}

template <class F>
std::string error_message(F&& f) {
    try {
        f();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("expression arithmetic and precedence") {
    CHECK(ev("1+2*3^2") == doctest::Approx(19.0));
    CHECK(ev("2^3^2") == doctest::Approx(512.0));   // right-associative power
    CHECK(ev("6/4/2") == doctest::Approx(0.75));    // left-associative division
    CHECK(ev("-x^2", 3.0) == doctest::Approx(-9.0)); // unary minus binds below power
    CHECK(ev("2^-2") == doctest::Approx(0.25));
    CHECK(ev("(1+x)*(y-2)", 2.0, 5.0) == doctest::Approx(9.0));
    CHECK(ev(" 1 +  x ", 4.0) == doctest::Approx(5.0));
    CHECK(ev("+x", 2.5) == doctest::Approx(2.5));
}

TEST_CASE("expression functions and constants") {
    CHECK(ev("sin(pi/2)") == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ev("cos(0)") == doctest::Approx(1.0));
    CHECK(ev("exp(0)") == doctest::Approx(1.0));
    CHECK(ev("log(exp(2))") == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(ev("exp(-50*((x-0.5)^2+(y-0.5)^2))", 0.5, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("parse errors report the offending position") {
    std::string m = error_message([] { Expr::parse("1+"); });
    CHECK(m.find("position") != std::string::npos);
    CHECK(!error_message([] { Expr::parse("(1+2"); }).empty());
    CHECK(!error_message([] { Expr::parse("foo(2)"); }).empty());
    CHECK(!error_message([] { Expr::parse("1 2"); }).empty());
    CHECK(!error_message([] { Expr::parse(""); }).empty());
    CHECK(!error_message([] { Expr::parse("sin()"); }).empty());
}

TEST_CASE("sampling rejects non-finite values and names the point") {
    Grid2D g = Grid2D::unit_square(5); // x = 0.5 is a node
    std::string m = error_message([&] { Expr::parse("1/(x-0.5)").sample(g); });
    CHECK(m.find("finite") != std::string::npos);
    CHECK(!error_message([&] { Expr::parse("log(x-2)").sample(g); }).empty());

    ScalarField s = Expr::parse("x*y+1").sample(g);
    CHECK(s.at(2, 4) == doctest::Approx(0.5 * 1.0 + 1.0));
}
