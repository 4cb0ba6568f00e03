#include "cdii/forward.hpp"

#include "cdii/ops.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace cdii {

double c2_proxy(const ScalarField& sigma) {
    const Grid2D& g = sigma.grid;
    VectorField2 ds = gradient_onesided2(sigma);

    // reuse the hessian stencils pointwise (central interior, one-sided boundary)
    ScalarField sy(g);
    sy.v = ds.y;
    VectorField2 dxy = gradient_onesided2(sy);

    const double ixx = 1.0 / (g.hx * g.hx), iyy = 1.0 / (g.hy * g.hy);
    double best = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            auto v = [&](int ii, int jj) { return sigma.at(ii, jj); };
            double sxx, syy;
            if (i == 0)
                sxx = (2 * v(0, j) - 5 * v(1, j) + 4 * v(2, j) - v(3, j)) * ixx;
            else if (i == g.nx - 1)
                sxx = (2 * v(i, j) - 5 * v(i - 1, j) + 4 * v(i - 2, j) - v(i - 3, j)) * ixx;
            else
                sxx = (v(i - 1, j) - 2 * v(i, j) + v(i + 1, j)) * ixx;
            if (j == 0)
                syy = (2 * v(i, 0) - 5 * v(i, 1) + 4 * v(i, 2) - v(i, 3)) * iyy;
            else if (j == g.ny - 1)
                syy = (2 * v(i, j) - 5 * v(i, j - 1) + 4 * v(i, j - 2) - v(i, j - 3)) * iyy;
            else
                syy = (v(i, j - 1) - 2 * v(i, j) + v(i, j + 1)) * iyy;
            std::size_t k = g.idx(i, j);
            double h2 = std::fabs(sxx) + 2.0 * std::fabs(dxy.x[k]) + std::fabs(syy);
            double c = std::fabs(sigma.v[k]) + std::hypot(ds.x[k], ds.y[k]) + h2;
            best = std::max(best, c);
        }
    return best;
}

ConductivityProblem::ConductivityProblem(ScalarField s, BoundaryTrace bc)
    : sigma(std::move(s)), f(std::move(bc)) {
    if (!sigma.grid.same_layout(f.grid))
        throw InvalidInput("ConductivityProblem: sigma and trace grids differ");
    for (double v : sigma.v)
        if (!(v > 0.0)) throw InvalidInput("ConductivityProblem: sigma violates the positive lower bound sigma0");
    for (double v : f.value)
        if (!std::isfinite(v)) throw InvalidInput("ConductivityProblem: non-finite trace value");
}

namespace {

inline double harm(double a, double b) { return 2.0 * a * b / (a + b); }

// 5-point conservative operator on interior unknowns; Dirichlet values folded
// into the right-hand side by the caller
struct InteriorOperator {
    const Grid2D& g;
    int mx, my; // interior node counts
    std::vector<double> ce, cw, cn, cs, cp; // face conductances / h^2 and diagonal

    explicit InteriorOperator(const ScalarField& sigma)
        : g(sigma.grid), mx(g.nx - 2), my(g.ny - 2),
          ce(std::size_t(mx) * my), cw(ce.size()), cn(ce.size()), cs(ce.size()), cp(ce.size()) {
        const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i) {
                int gi = i + 1, gj = j + 1;
                double sp = sigma.at(gi, gj);
                std::size_t k = std::size_t(j) * mx + i;
                ce[k] = harm(sp, sigma.at(gi + 1, gj)) * ax;
                cw[k] = harm(sp, sigma.at(gi - 1, gj)) * ax;
                cn[k] = harm(sp, sigma.at(gi, gj + 1)) * ay;
                cs[k] = harm(sp, sigma.at(gi, gj - 1)) * ay;
                cp[k] = ce[k] + cw[k] + cn[k] + cs[k];
            }
    }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i) {
                std::size_t k = std::size_t(j) * mx + i;
                double s = cp[k] * x[k];
                if (i > 0) s -= cw[k] * x[k - 1];
                if (i < mx - 1) s -= ce[k] * x[k + 1];
                if (j > 0) s -= cs[k] * x[k - mx];
                if (j < my - 1) s -= cn[k] * x[k + mx];
                y[k] = s;
            }
    }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

} // namespace

ForwardSolution solve_conductivity(const ConductivityProblem& p) {
    const Grid2D& g = p.sigma.grid;
    const int mx = g.nx - 2, my = g.ny - 2;
    const std::size_t n = std::size_t(mx) * my;

    ScalarField u(g);
    p.f.apply_to(u);

    InteriorOperator A(p.sigma);

    // rhs: Dirichlet neighbours of near-boundary interior nodes
    std::vector<double> b(n, 0.0);
    for (int j = 0; j < my; ++j)
        for (int i = 0; i < mx; ++i) {
            int gi = i + 1, gj = j + 1;
            std::size_t k = std::size_t(j) * mx + i;
            double s = 0.0;
            if (gi == 1) s += A.cw[k] * u.at(0, gj);
            if (gi == g.nx - 2) s += A.ce[k] * u.at(g.nx - 1, gj);
            if (gj == 1) s += A.cs[k] * u.at(gi, 0);
            if (gj == g.ny - 2) s += A.cn[k] * u.at(gi, g.ny - 1);
            b[k] = s;
        }

    std::vector<double> x(n, 0.0), r(b), z(n), q(n), d(n);
    double bnorm = std::sqrt(dot(b, b));
    int iters = 0;
    double rel = 0.0;

    if (bnorm > 0.0) {
        // Jacobi-preconditioned CG
        std::vector<double> inv_diag(n);
        for (std::size_t k = 0; k < n; ++k) inv_diag[k] = 1.0 / A.cp[k];

        int cap = p.max_iter > 0 ? p.max_iter : std::max(2000, 40 * std::max(mx, my));
        for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
        d = z;
        double rz = dot(r, z);
        double best = std::sqrt(dot(r, r)) / bnorm;

        for (iters = 0; iters < cap; ++iters) {
            A.apply(d, q);
            double alpha = rz / dot(d, q);
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += alpha * d[k];
                r[k] -= alpha * q[k];
            }
            rel = std::sqrt(dot(r, r)) / bnorm;
            best = std::min(best, rel);
            if (rel <= p.tol) {
                ++iters;
                break;
            }
            double rz_new;
            for (std::size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
            rz_new = dot(r, z);
            double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t k = 0; k < n; ++k) d[k] = z[k] + beta * d[k];
        }
        if (rel > p.tol)
            throw SolveFailure("solve_conductivity: PCG did not reach tol, best residual " +
                                   std::to_string(best),
                               best);
    }

    for (int j = 0; j < my; ++j)
        for (int i = 0; i < mx; ++i) u.at(i + 1, j + 1) = x[std::size_t(j) * mx + i];

    ForwardSolution sol;
    sol.u = u;
    VectorField2 du = gradient(u);
    sol.J = VectorField2(g);
    for (std::size_t k = 0; k < sol.J.size(); ++k) {
        sol.J.x[k] = -p.sigma.v[k] * du.x[k];
        sol.J.y[k] = -p.sigma.v[k] * du.y[k];
    }
    sol.a = sol.J.magnitude();
    sol.residual_norm = rel;
    sol.iterations = iters;
    return sol;
}

AdmissibilityReport admissibility_check(const ForwardSolution& sol, const ScalarField& sigma,
                                        const AdmissibilityBounds& b) {
    AdmissibilityReport rep;
    rep.a_min = sol.a.min();
    rep.a_max = sol.a.max();
    rep.sigma_min = sigma.min();
    rep.sigma_max = sigma.max();
    rep.sigma2_proxy = c2_proxy(sigma);

    VectorField2 du = gradient_onesided2(sol.u);
    double gmin = std::numeric_limits<double>::infinity();
    const double thresh = 1e-10;
    for (std::size_t k = 0; k < du.size(); ++k) {
        double m = std::hypot(du.x[k], du.y[k]);
        gmin = std::min(gmin, m);
        if (m <= thresh) ++rep.grad_zero_nodes;
    }
    rep.grad_min = gmin;
    rep.a_in_band = rep.a_min >= b.m && rep.a_max <= b.M;
    rep.sigma_in_band = rep.sigma_min > b.sigma0 && rep.sigma_max <= b.sigma1;
    rep.grad_positive = rep.grad_zero_nodes == 0;
    return rep;
}

BoundaryTrace two_to_one_trace(const Grid2D& g, TraceKind kind, double theta) {
    switch (kind) {
    case TraceKind::Linear:
        return BoundaryTrace::sample(g, [](double x, double) { return x; });
    case TraceKind::TiltedLinear: {
        double c = std::cos(theta), s = std::sin(theta);
        return BoundaryTrace::sample(g, [=](double x, double y) { return c * x + s * y; });
    }
    }
    throw InvalidInput("two_to_one_trace: unknown kind");
}

int count_boundary_extrema(const BoundaryTrace& f) {
    // compress plateaus, then count sign changes of the cyclic differences
    std::vector<double> r;
    for (double v : f.value)
        if (r.empty() || v != r.back()) r.push_back(v);
    while (r.size() > 1 && r.front() == r.back()) r.pop_back();
    if (r.size() < 2) return 0;

    int changes = 0;
    std::size_t n = r.size();
    for (std::size_t k = 0; k < n; ++k) {
        double prev = r[(k + n - 1) % n], cur = r[k], nxt = r[(k + 1) % n];
        if ((cur - prev) * (nxt - cur) < 0.0) ++changes;
    }
    return changes;
}

} // namespace cdii
