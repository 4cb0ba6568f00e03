#include <doctest.h>

#include "cdii/forward.hpp"
#include "cdii/grid.hpp"
#include "cdii/least_gradient.hpp"
#include "cdii/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace cdii;

namespace {

constexpr double pi = std::numbers::pi;

// forward-difference weighted total variation, the solver's primal objective
double fd_energy(const ScalarField& a, const ScalarField& u) {
    const Grid2D& g = u.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double dx = (i + 1 < g.nx) ? (u.at(i + 1, j) - u.at(i, j)) / g.hx : 0.0;
            double dy = (j + 1 < g.ny) ? (u.at(i, j + 1) - u.at(i, j)) / g.hy : 0.0;
            s += a.at(i, j) * std::hypot(dx, dy);
        }
    return s * g.hx * g.hy;
}

} // namespace

TEST_CASE("uniform weight with linear data is minimized exactly with clean certificates") {
    Grid2D g = Grid2D::unit_square(65);
    ScalarField one(g, 1.0);
    BoundaryTrace f = two_to_one_trace(g, TraceKind::Linear);
    LGPProblem p(one, f, 0.5, 2.0);

    double worst_excess = 0.0;
    PDParams pd;
    pd.observer = [&](int, double e) { worst_excess = std::max(worst_excess, e); };
    LGPSolution sol = solve_lgp(p, pd);

    CHECK(sol.converged);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            CHECK(sol.u.at(i, j) == doctest::Approx(g.x(i)).epsilon(1e-6));
    CHECK(worst_excess <= 1e-12);

    CertificateReport cert = dual_certificate(sol, p);
    CHECK(cert.phi_excess <= 1e-8);
    CHECK(cert.div_l2_interior <= 1e-2);
    CHECK(std::fabs(cert.alignment_residual) <= 1e-3 * cert.energy_central);
    CHECK(cert.energy_central == doctest::Approx(1.0).epsilon(1e-6));
    // trailing forward-difference column pads the primal objective by one cell width
    CHECK(sol.energy == doctest::Approx(1.0 + g.hy).epsilon(1e-6));
}

TEST_CASE("dual iterates stay inside the weight ball at every iteration") {
    Grid2D g = Grid2D::unit_square(33);
    ScalarField a = ScalarField::sample(g, [](double x, double) { return 1.0 + x; });
    BoundaryTrace f = two_to_one_trace(g, TraceKind::TiltedLinear, 0.6);
    LGPProblem p(a, f, 0.5, 3.0);
    double worst_excess = 0.0;
    PDParams pd;
    pd.max_iter = 3000;
    pd.observer = [&](int, double e) { worst_excess = std::max(worst_excess, e); };
    LGPSolution sol = solve_lgp(p, pd);
    CHECK(worst_excess <= 1e-12);
    CertificateReport cert = dual_certificate(sol, p);
    CHECK(cert.phi_excess <= 1e-12);
}

TEST_CASE("weighted energy matches closed forms") {
    Grid2D g = Grid2D::unit_square(129);
    ScalarField two(g, 2.0);
    ScalarField parab =
        ScalarField::sample(g, [](double x, double y) { return x * x + y * y; });
    // integral of 2*2 sqrt(x^2+y^2): 4 (sqrt 2 + ln(1+sqrt 2)) / 3
    const double exact = 4.0 * (std::sqrt(2.0) + std::log(1.0 + std::sqrt(2.0))) / 3.0;
    CHECK(energy(two, parab) == doctest::Approx(exact).epsilon(1e-3));

    ScalarField w = ScalarField::sample(g, [](double, double y) { return 1.0 + y; });
    ScalarField xf = ScalarField::sample(g, [](double x, double) { return x; });
    CHECK(energy(w, xf) == doctest::Approx(1.5).epsilon(1e-12));

    ScalarField other(Grid2D::unit_square(65), 1.0);
    CHECK_THROWS_AS(energy(other, parab), InvalidInput);
}

TEST_CASE("alignment defect reproduces the constant-angle closed form") {
    Grid2D g = Grid2D::unit_square(65);
    VectorField2 J(g), Jt(g);
    for (std::size_t k = 0; k < J.size(); ++k) {
        J.x[k] = 1.0;
        J.y[k] = 0.0;
        Jt.x[k] = std::cos(pi / 6);
        Jt.y[k] = std::sin(pi / 6);
    }
    CHECK(alignment_defect(J, Jt) == doctest::Approx(1.0 - std::cos(pi / 6)).epsilon(1e-12));
    CHECK(std::fabs(alignment_defect(J, J)) <= 1e-12);

    VectorField2 A(g), B(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::size_t k = g.idx(i, j);
            A.x[k] = std::sin(3 * g.x(i));
            A.y[k] = std::cos(2 * g.y(j));
            B.x[k] = g.x(i) - 0.3;
            B.y[k] = std::exp(g.y(j));
        }
    CHECK(alignment_defect(A, B) >= -1e-12);
}

TEST_CASE("scaling the weight scales the energy and keeps the minimizer") {
    Grid2D g = Grid2D::unit_square(33);
    BoundaryTrace f = two_to_one_trace(g, TraceKind::Linear);

    SUBCASE("uniform weight") {
        ScalarField a1(g, 1.0), a3(g, 3.0);
        LGPSolution s1 = solve_lgp(LGPProblem(a1, f, 0.5, 2.0));
        LGPSolution s3 = solve_lgp(LGPProblem(a3, f, 1.5, 6.0));
        REQUIRE(s1.converged);
        REQUIRE(s3.converged);
        double du = 0.0;
        for (std::size_t k = 0; k < s1.u.size(); ++k)
            du = std::max(du, std::fabs(s1.u.v[k] - s3.u.v[k]));
        CHECK(du <= 1e-8);
        CHECK(s3.energy == doctest::Approx(3.0 * s1.energy).epsilon(1e-9));
    }

    SUBCASE("layered weight") {
        ScalarField a1 = ScalarField::sample(g, [](double x, double) { return 1.0 + x; });
        ScalarField a3 = ScalarField::sample(g, [](double x, double) { return 3.0 + 3 * x; });
        PDParams pd;
        pd.tol_gap = 1e-5;
        LGPSolution s1 = solve_lgp(LGPProblem(a1, f, 0.5, 3.0), pd);
        LGPSolution s3 = solve_lgp(LGPProblem(a3, f, 1.5, 9.0), pd);
        REQUIRE(s1.converged);
        REQUIRE(s3.converged);
        CHECK(s3.energy / (3.0 * s1.energy) == doctest::Approx(1.0).epsilon(5e-4));
    }
}

TEST_CASE("minimizer energy is certified against a feasible competitor") {
    Grid2D g = Grid2D::unit_square(49);
    ScalarField sigma = ScalarField::sample(g, [](double x, double) { return 1.0 + x; });
    BoundaryTrace f = BoundaryTrace::sample(
        g, [](double x, double) { return std::log1p(x) / std::log(2.0); });
    ForwardSolution fw = solve_conductivity(ConductivityProblem(sigma, f));

    LGPProblem p(fw.a, f, 0.9 * fw.a.min(), 1.1 * fw.a.max());
    PDParams pd;
    pd.tol_gap = 1e-4;
    LGPSolution sol = solve_lgp(p, pd);
    REQUIRE(sol.converged);

    double e_hat = fd_energy(fw.a, sol.u);
    double e_ref = fd_energy(fw.a, fw.u);
    CHECK(e_hat <= e_ref + sol.gap + 1e-10 * std::max(1.0, e_ref));
    CHECK(sol.energy == doctest::Approx(e_hat).epsilon(1e-12));
}

TEST_CASE("conductivity recovery inverts the magnitude relation built from the same gradient") {
    Grid2D g = Grid2D::unit_square(65);
    ScalarField sigma = ScalarField::sample(g, [](double x, double) { return 1.0 + x; });
    BoundaryTrace f = BoundaryTrace::sample(
        g, [](double x, double) { return std::log1p(x) / std::log(2.0); });
    ForwardSolution fw = solve_conductivity(ConductivityProblem(sigma, f));

    VectorField2 du = gradient(fw.u);
    ScalarField a_synth(g);
    for (std::size_t k = 0; k < a_synth.size(); ++k)
        a_synth.v[k] = sigma.v[k] * std::hypot(du.x[k], du.y[k]);

    SigmaRecovery rec = recover_sigma(a_synth, fw.u, 1e-6);
    CHECK(rec.floored_fraction == 0.0);
    CHECK(!rec.warn);
    for (std::size_t k = 0; k < sigma.size(); ++k)
        CHECK(rec.sigma.v[k] == doctest::Approx(sigma.v[k]).epsilon(1e-12));
}

TEST_CASE("conductivity recovery floors degenerate gradients and warns") {
    Grid2D g = Grid2D::unit_square(17);
    ScalarField a(g, 1.0), u(g, 5.0);
    SigmaRecovery rec = recover_sigma(a, u, 1e-6);
    CHECK(rec.floored_fraction == 1.0);
    CHECK(rec.warn);
    CHECK(rec.sigma.v[0] == doctest::Approx(1e6));
    CHECK_THROWS_AS(recover_sigma(a, u, 0.0), InvalidInput);
}

TEST_CASE("problem and parameter validation") {
    Grid2D g = Grid2D::unit_square(9);
    ScalarField one(g, 1.0);
    BoundaryTrace f = two_to_one_trace(g, TraceKind::Linear);
    CHECK_THROWS_AS(LGPProblem(one, f, 0.5, 0.9), InvalidInput);  // weight above the band
    CHECK_THROWS_AS(LGPProblem(one, f, 1.5, 2.0), InvalidInput);  // weight below the band
    CHECK_THROWS_AS(LGPProblem(one, f, 0.0, 2.0), InvalidInput);  // m must be positive
    CHECK_THROWS_AS(LGPProblem(one, f, 2.0, 1.0), InvalidInput);  // m <= M

    PDParams pd;
    pd.tau = 10.0;
    pd.sigma = 10.0;
    CHECK_THROWS_AS(pd.validate(g), InvalidInput); // violates the step-size bound
    pd.tau = 0.0;
    CHECK_THROWS_AS(pd.validate(g), InvalidInput); // one of the pair missing
    pd = PDParams{};
    pd.tol_gap = 0.0;
    CHECK_THROWS_AS(pd.validate(g), InvalidInput);
    pd = PDParams{};
    pd.max_iter = 0;
    CHECK_THROWS_AS(pd.validate(g), InvalidInput);
}

TEST_CASE("iteration cap returns the best iterate unconverged") {
    Grid2D g = Grid2D::unit_square(33);
    ScalarField a = ScalarField::sample(g, [](double x, double y) { return 1.0 + x * y; });
    BoundaryTrace f = two_to_one_trace(g, TraceKind::TiltedLinear, 1.1);
    PDParams pd;
    pd.max_iter = 10;
    pd.check_every = 5;
    LGPSolution sol = solve_lgp(LGPProblem(a, f, 0.5, 3.0), pd);
    CHECK(!sol.converged);
    CHECK(sol.iterations == 10);
    CHECK(sol.gap > 0.0);
    for (double v : sol.u.v) CHECK(std::isfinite(v));
}
