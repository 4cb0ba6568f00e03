#include <doctest.h>

#include "cdii/grid.hpp"
#include "cdii/ops.hpp"

#include <cmath>
#include <numbers>

using namespace cdii;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField boundary_zeroed(ScalarField u) {
    const Grid2D& g = u.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.is_boundary(i, j)) u.at(i, j) = 0.0;
    return u;
}

} // namespace

TEST_CASE("gradient and divergence are adjoint to machine precision") {
    Grid2D g = Grid2D::box(41, 29, -0.3, 1.4, 0.2, 1.1);
    ScalarField u = boundary_zeroed(ScalarField::sample(g, [](double x, double y) {
        return (x + 0.3) * (1.4 - x) * (y - 0.2) * (1.1 - y) * std::exp(x - y);
    }));
    VectorField2 v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            v.x[g.idx(i, j)] = std::cos(3 * g.x(i) + g.y(j));
            v.y[g.idx(i, j)] = std::exp(g.x(i) - g.y(j)) + g.x(i) * g.x(i);
        }
    double lhs = inner(gradient(u), v);
    double rhs = -inner(u, divergence(v));
    double scale = std::max(1.0, lp_norm(u, Lp::L2) * lp_norm(v, Lp::L2));
    CHECK(std::fabs(lhs - rhs) <= 1e-11 * scale);
}

TEST_CASE("divergence annihilates constants and is exact on linear fields") {
    Grid2D g = Grid2D::box(17, 13, 0.0, 2.0, -1.0, 1.0);
    VectorField2 c(g);
    for (std::size_t k = 0; k < c.size(); ++k) {
        c.x[k] = 3.5;
        c.y[k] = -2.25;
    }
    ScalarField d = divergence(c);
    for (double v : d.v) CHECK(std::fabs(v) <= 1e-13);

    VectorField2 lin(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            lin.x[g.idx(i, j)] = g.x(i);
            lin.y[g.idx(i, j)] = g.y(j);
        }
    ScalarField d2 = divergence(lin);
    for (double v : d2.v) CHECK(v == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("gradient is exact on linears; one-sided variant is exact on quadratics") {
    Grid2D g = Grid2D::unit_square(21);
    ScalarField lin = ScalarField::sample(g, [](double x, double y) { return 2 * x + 3 * y; });
    VectorField2 dl = gradient(lin);
    for (std::size_t k = 0; k < dl.size(); ++k) {
        CHECK(dl.x[k] == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(dl.y[k] == doctest::Approx(3.0).epsilon(1e-13));
    }

    ScalarField quad = ScalarField::sample(g, [](double x, double) { return x * x; });
    VectorField2 d2 = gradient_onesided2(quad);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            CHECK(d2.x[g.idx(i, j)] == doctest::Approx(2 * g.x(i)).epsilon(1e-11));
    // the adjoint-compatible closure is only first order there
    VectorField2 d1 = gradient(quad);
    CHECK(d1.x[g.idx(0, 5)] == doctest::Approx(g.hx).epsilon(1e-12));
}

TEST_CASE("trapezoid quadrature and norms reproduce closed forms") {
    Grid2D g = Grid2D::unit_square(129);
    ScalarField one(g, 1.0);
    CHECK(integrate(one) == doctest::Approx(1.0).epsilon(1e-13));
    ScalarField xf = ScalarField::sample(g, [](double x, double) { return x; });
    CHECK(integrate(xf) == doctest::Approx(0.5).epsilon(1e-13));

    ScalarField ss = ScalarField::sample(
        g, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
    CHECK(lp_norm(ss, Lp::L2) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(lp_norm(ss, Lp::L1) == doctest::Approx(4.0 / (pi * pi)).epsilon(1e-4));
    CHECK(lp_norm(ss, Lp::Linf) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(inner(ss, ss) == doctest::Approx(0.25).epsilon(1e-4));

    VectorField2 v(g);
    for (std::size_t k = 0; k < v.size(); ++k) {
        v.x[k] = 3.0;
        v.y[k] = 4.0;
    }
    CHECK(lp_norm(v, Lp::Linf) == doctest::Approx(5.0));
    CHECK(lp_norm(v, Lp::L1) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("hessian L1 of the product of sines matches the closed form") {
    // integral of |uxx| + 2|uxy| + |uyy| for sin(pi x) sin(pi y) on the unit
    // square: each of the four pieces contributes 4, total 16
    Grid2D g = Grid2D::unit_square(129);
    ScalarField ss = ScalarField::sample(
        g, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
    CHECK(hessian_l1(ss) == doctest::Approx(16.0).epsilon(0.01));
}

TEST_CASE("total variation of the paraboloid matches the closed form") {
    // integral of 2 sqrt(x^2+y^2) over the unit square: 2 (sqrt 2 + ln(1+sqrt 2)) / 3
    const double exact = 2.0 * (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0))) / 3.0;
    Grid2D g = Grid2D::unit_square(129);
    ScalarField u =
        ScalarField::sample(g, [](double x, double y) { return x * x + y * y; });
    VectorField2 du = gradient(u);
    CHECK(lp_norm(du, Lp::L1) == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("coarea identity holds exactly for a linear ramp") {
    Grid2D g = Grid2D::unit_square(65);
    ScalarField u = ScalarField::sample(g, [](double x, double) { return x; });
    CoareaResult r = coarea_check(u, 64);
    CHECK(r.n_levels == 64);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.rel_gap <= 1e-10);
}

TEST_CASE("coarea identity closes within two percent on the paraboloid") {
    const double exact = 2.0 * (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0))) / 3.0;
    Grid2D g = Grid2D::unit_square(129);
    ScalarField u =
        ScalarField::sample(g, [](double x, double y) { return x * x + y * y; });
    CoareaResult r = coarea_check(u, 128);
    CHECK(r.lhs == doctest::Approx(exact).epsilon(1e-3));
    CHECK(r.rel_gap <= 0.02);
}

TEST_CASE("coarea rejects constant fields") {
    Grid2D g = Grid2D::unit_square(9);
    ScalarField u(g, 4.0);
    CHECK_THROWS_AS(coarea_check(u, 8), InvalidInput);
    ScalarField xf = ScalarField::sample(g, [](double x, double) { return x; });
    CHECK_THROWS_AS(coarea_check(xf, 0), InvalidInput);
}
