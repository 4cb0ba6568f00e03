#include "cdii/ops.hpp"

#include "cdii/level_sets.hpp"

#include <cmath>
#include <limits>

namespace cdii {

namespace {

// trapezoid weight of node (i,j): 1/4 corners, 1/2 edges, 1 interior
inline double trap_w(const Grid2D& g, int i, int j) {
    double w = 1.0;
    if (i == 0 || i == g.nx - 1) w *= 0.5;
    if (j == 0 || j == g.ny - 1) w *= 0.5;
    return w;
}

} // namespace

VectorField2 gradient(const ScalarField& u) {
    const Grid2D& g = u.grid;
    VectorField2 d(g);
    const double ix = 1.0 / g.hx, iy = 1.0 / g.hy;
    for (int j = 0; j < g.ny; ++j) {
        const double* row = &u.v[g.idx(0, j)];
        double* dx = &d.x[g.idx(0, j)];
        dx[0] = (row[1] - row[0]) * ix;
        for (int i = 1; i < g.nx - 1; ++i) dx[i] = (row[i + 1] - row[i - 1]) * (0.5 * ix);
        dx[g.nx - 1] = (row[g.nx - 1] - row[g.nx - 2]) * ix;
    }
    for (int i = 0; i < g.nx; ++i) {
        d.y[g.idx(i, 0)] = (u.at(i, 1) - u.at(i, 0)) * iy;
        for (int j = 1; j < g.ny - 1; ++j)
            d.y[g.idx(i, j)] = (u.at(i, j + 1) - u.at(i, j - 1)) * (0.5 * iy);
        d.y[g.idx(i, g.ny - 1)] = (u.at(i, g.ny - 1) - u.at(i, g.ny - 2)) * iy;
    }
    return d;
}

VectorField2 gradient_onesided2(const ScalarField& u) {
    const Grid2D& g = u.grid;
    VectorField2 d(g);
    const double ix = 0.5 / g.hx, iy = 0.5 / g.hy;
    for (int j = 0; j < g.ny; ++j) {
        const double* row = &u.v[g.idx(0, j)];
        double* dx = &d.x[g.idx(0, j)];
        dx[0] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) * ix;
        for (int i = 1; i < g.nx - 1; ++i) dx[i] = (row[i + 1] - row[i - 1]) * ix;
        dx[g.nx - 1] = (3.0 * row[g.nx - 1] - 4.0 * row[g.nx - 2] + row[g.nx - 3]) * ix;
    }
    for (int i = 0; i < g.nx; ++i) {
        d.y[g.idx(i, 0)] = (-3.0 * u.at(i, 0) + 4.0 * u.at(i, 1) - u.at(i, 2)) * iy;
        for (int j = 1; j < g.ny - 1; ++j)
            d.y[g.idx(i, j)] = (u.at(i, j + 1) - u.at(i, j - 1)) * iy;
        d.y[g.idx(i, g.ny - 1)] =
            (3.0 * u.at(i, g.ny - 1) - 4.0 * u.at(i, g.ny - 2) + u.at(i, g.ny - 3)) * iy;
    }
    return d;
}

ScalarField divergence(const VectorField2& v) {
    const Grid2D& g = v.grid;
    ScalarField d(g);
    const double ix = 1.0 / g.hx, iy = 1.0 / g.hy;
    for (int j = 0; j < g.ny; ++j) {
        const double* vx = &v.x[g.idx(0, j)];
        double* out = &d.v[g.idx(0, j)];
        out[0] = (vx[1] - vx[0]) * ix;
        for (int i = 1; i < g.nx - 1; ++i) out[i] = (vx[i + 1] - vx[i - 1]) * (0.5 * ix);
        out[g.nx - 1] = (vx[g.nx - 1] - vx[g.nx - 2]) * ix;
    }
    for (int i = 0; i < g.nx; ++i) {
        d.v[g.idx(i, 0)] += (v.y[g.idx(i, 1)] - v.y[g.idx(i, 0)]) * iy;
        for (int j = 1; j < g.ny - 1; ++j)
            d.v[g.idx(i, j)] += (v.y[g.idx(i, j + 1)] - v.y[g.idx(i, j - 1)]) * (0.5 * iy);
        d.v[g.idx(i, g.ny - 1)] +=
            (v.y[g.idx(i, g.ny - 1)] - v.y[g.idx(i, g.ny - 2)]) * iy;
    }
    return d;
}

double integrate(const ScalarField& f) {
    const Grid2D& g = f.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        double wy = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
        double rs = 0.0;
        const double* row = &f.v[g.idx(0, j)];
        rs += 0.5 * row[0];
        for (int i = 1; i < g.nx - 1; ++i) rs += row[i];
        rs += 0.5 * row[g.nx - 1];
        s += wy * rs;
    }
    return s * g.hx * g.hy;
}

double inner(const ScalarField& a, const ScalarField& b) {
    const Grid2D& g = a.grid;
    if (!g.same_layout(b.grid)) throw InvalidInput("inner: grid mismatch");
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::size_t k = g.idx(i, j);
            s += trap_w(g, i, j) * a.v[k] * b.v[k];
        }
    return s * g.hx * g.hy;
}

double inner(const VectorField2& a, const VectorField2& b) {
    const Grid2D& g = a.grid;
    if (!g.same_layout(b.grid)) throw InvalidInput("inner: grid mismatch");
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::size_t k = g.idx(i, j);
            s += trap_w(g, i, j) * (a.x[k] * b.x[k] + a.y[k] * b.y[k]);
        }
    return s * g.hx * g.hy;
}

double lp_norm(const ScalarField& u, Lp p) {
    const Grid2D& g = u.grid;
    if (p == Lp::Linf) {
        double m = 0.0;
        for (double x : u.v) m = std::max(m, std::fabs(x));
        return m;
    }
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double w = trap_w(g, i, j), x = u.v[g.idx(i, j)];
            s += w * (p == Lp::L1 ? std::fabs(x) : x * x);
        }
    s *= g.hx * g.hy;
    return p == Lp::L1 ? s : std::sqrt(s);
}

double lp_norm(const VectorField2& u, Lp p) {
    const Grid2D& g = u.grid;
    if (p == Lp::Linf) {
        double m = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::hypot(u.x[k], u.y[k]));
        return m;
    }
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            std::size_t k = g.idx(i, j);
            double w = trap_w(g, i, j);
            double m2 = u.x[k] * u.x[k] + u.y[k] * u.y[k];
            s += w * (p == Lp::L1 ? std::sqrt(m2) : m2);
        }
    s *= g.hx * g.hy;
    return p == Lp::L1 ? s : std::sqrt(s);
}

double hessian_l1(const ScalarField& u) {
    const Grid2D& g = u.grid;
    const double ixx = 1.0 / (g.hx * g.hx), iyy = 1.0 / (g.hy * g.hy);

    // second derivatives: central interior, 4-point one-sided at the boundary,
    // both second-order accurate
    auto d2 = [](double a, double b, double c) { return a - 2.0 * b + c; };
    ScalarField uxx(g), uyy(g);
    for (int j = 0; j < g.ny; ++j) {
        const double* r = &u.v[g.idx(0, j)];
        double* o = &uxx.v[g.idx(0, j)];
        o[0] = (2.0 * r[0] - 5.0 * r[1] + 4.0 * r[2] - r[3]) * ixx;
        for (int i = 1; i < g.nx - 1; ++i) o[i] = d2(r[i - 1], r[i], r[i + 1]) * ixx;
        o[g.nx - 1] =
            (2.0 * r[g.nx - 1] - 5.0 * r[g.nx - 2] + 4.0 * r[g.nx - 3] - r[g.nx - 4]) * ixx;
    }
    for (int i = 0; i < g.nx; ++i) {
        uyy.v[g.idx(i, 0)] =
            (2.0 * u.at(i, 0) - 5.0 * u.at(i, 1) + 4.0 * u.at(i, 2) - u.at(i, 3)) * iyy;
        for (int j = 1; j < g.ny - 1; ++j)
            uyy.v[g.idx(i, j)] = d2(u.at(i, j - 1), u.at(i, j), u.at(i, j + 1)) * iyy;
        uyy.v[g.idx(i, g.ny - 1)] = (2.0 * u.at(i, g.ny - 1) - 5.0 * u.at(i, g.ny - 2) +
                                     4.0 * u.at(i, g.ny - 3) - u.at(i, g.ny - 4)) * iyy;
    }

    // mixed derivative as composition of second-order first-derivative stencils
    VectorField2 gy = gradient_onesided2(u);
    ScalarField uy(g);
    uy.v = gy.y;
    VectorField2 gxy = gradient_onesided2(uy);

    ScalarField integrand(g);
    for (std::size_t k = 0; k < integrand.size(); ++k)
        integrand.v[k] = std::fabs(uxx.v[k]) + 2.0 * std::fabs(gxy.x[k]) + std::fabs(uyy.v[k]);
    return integrate(integrand);
}

CoareaResult coarea_check(const ScalarField& u, int n_levels) {
    if (n_levels < 1) throw InvalidInput("coarea_check: need n_levels >= 1");
    double lo = u.min(), hi = u.max();
    if (!(hi > lo)) throw InvalidInput("coarea_check: constant field has no level structure");

    CoareaResult r;
    r.n_levels = n_levels;
    r.lhs = lp_norm(gradient(u), Lp::L1);

    double dt = (hi - lo) / n_levels;
    double sum = 0.0;
    for (int k = 0; k < n_levels; ++k) {
        double t = lo + (k + 0.5) * dt; // midpoint rule over the level range
        LevelSet ls = extract_level_set(u, t);
        for (const auto& c : ls.components) sum += c.arclength;
    }
    r.rhs = sum * dt;
    r.rel_gap = std::fabs(r.lhs - r.rhs) / std::max(std::fabs(r.lhs), 1e-300);
    return r;
}

} // namespace cdii
