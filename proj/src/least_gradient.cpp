#include "cdii/least_gradient.hpp"

#include "cdii/ops.hpp"

#include <cmath>
#include <vector>

namespace cdii {

LGPProblem::LGPProblem(ScalarField a_, BoundaryTrace f_, double m_, double M_)
    : a(std::move(a_)), f(std::move(f_)), m(m_), M(M_) {
    if (!a.grid.same_layout(f.grid)) throw InvalidInput("LGPProblem: grid mismatch");
    if (!(0.0 < m && m <= M)) throw InvalidInput("LGPProblem: need 0 < m <= M");
    for (double v : a.v)
        if (!(v >= m && v <= M))
            throw InvalidInput("LGPProblem: weight leaves the band [m, M]");
}

void PDParams::validate(const Grid2D& g) const {
    double L2 = 4.0 * (1.0 / (g.hx * g.hx) + 1.0 / (g.hy * g.hy));
    if (tau > 0.0 && sigma > 0.0 && tau * sigma * L2 > 1.0 + 1e-12)
        throw InvalidInput("PDParams: tau*sigma exceeds 1/L^2 stability bound");
    if ((tau > 0.0) != (sigma > 0.0))
        throw InvalidInput("PDParams: set both tau and sigma or neither");
    if (tol_gap <= 0.0 || max_iter < 1 || check_every < 1)
        throw InvalidInput("PDParams: nonpositive tolerance or iteration budget");
}

namespace {

// forward-difference gradient, zero on the trailing row/column
inline void grad_fwd(const Grid2D& g, const std::vector<double>& u, std::vector<double>& dx,
                     std::vector<double>& dy) {
    const double ix = 1.0 / g.hx, iy = 1.0 / g.hy;
    for (int j = 0; j < g.ny; ++j) {
        std::size_t row = g.idx(0, j);
        for (int i = 0; i < g.nx - 1; ++i) dx[row + i] = (u[row + i + 1] - u[row + i]) * ix;
        dx[row + g.nx - 1] = 0.0;
    }
    for (int j = 0; j < g.ny - 1; ++j) {
        std::size_t row = g.idx(0, j);
        for (int i = 0; i < g.nx; ++i) dy[row + i] = (u[row + i + g.nx] - u[row + i]) * iy;
    }
    for (int i = 0; i < g.nx; ++i) dy[g.idx(i, g.ny - 1)] = 0.0;
}

// negative transpose of grad_fwd (backward-difference divergence)
inline void div_bwd(const Grid2D& g, const std::vector<double>& px,
                    const std::vector<double>& py, std::vector<double>& out) {
    const double ix = 1.0 / g.hx, iy = 1.0 / g.hy;
    for (int j = 0; j < g.ny; ++j) {
        std::size_t row = g.idx(0, j);
        out[row] = px[row] * ix;
        for (int i = 1; i < g.nx - 1; ++i) out[row + i] = (px[row + i] - px[row + i - 1]) * ix;
        out[row + g.nx - 1] = -px[row + g.nx - 2] * ix;
    }
    for (int i = 0; i < g.nx; ++i) {
        out[g.idx(i, 0)] += py[g.idx(i, 0)] * iy;
        for (int j = 1; j < g.ny - 1; ++j)
            out[g.idx(i, j)] += (py[g.idx(i, j)] - py[g.idx(i, j - 1)]) * iy;
        out[g.idx(i, g.ny - 1)] -= py[g.idx(i, g.ny - 2)] * iy;
    }
}

struct GapTerms {
    double energy = 0.0;  // sum a |grad+ u|
    double align = 0.0;   // energy - <grad+ u, phi>
    double div_l1 = 0.0;  // interior L1 of div- phi
};

GapTerms gap_terms(const Grid2D& g, const ScalarField& a, const std::vector<double>& u,
                   const std::vector<double>& px, const std::vector<double>& py) {
    std::size_t n = a.size();
    std::vector<double> dx(n), dy(n), dv(n);
    grad_fwd(g, u, dx, dy);
    div_bwd(g, px, py, dv);
    GapTerms t;
    double dot = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double m = std::hypot(dx[k], dy[k]);
        t.energy += a.v[k] * m;
        dot += dx[k] * px[k] + dy[k] * py[k];
    }
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) t.div_l1 += std::fabs(dv[g.idx(i, j)]);
    double cell = g.hx * g.hy;
    t.energy *= cell;
    t.align = t.energy - dot * cell;
    t.div_l1 *= cell;
    return t;
}

} // namespace

LGPSolution solve_lgp(const LGPProblem& p, const PDParams& pd_in) {
    const Grid2D& g = p.a.grid;
    PDParams pd = pd_in;
    pd.validate(g);
    double L2 = 4.0 / (g.hx * g.hx) + 4.0 / (g.hy * g.hy);
    if (pd.tau <= 0.0) pd.tau = pd.sigma = 1.0 / std::sqrt(L2);

    // warm start: harmonic extension of the boundary data
    ScalarField ones(g, 1.0);
    ConductivityProblem warm(ones, p.f);
    ScalarField u0 = solve_conductivity(warm).u;

    const std::size_t n = g.size();
    std::vector<double> u(u0.v), ubar(u0.v), uprev(n);
    std::vector<double> px(n, 0.0), py(n, 0.0), dx(n), dy(n), dv(n);

    const double osc = p.f.max() - p.f.min();
    double gap = 0.0, rel_gap = 0.0, e_now = 0.0;
    bool converged = false;
    int it = 0;

    for (it = 0; it < pd.max_iter; ++it) {
        // dual ascent + radial projection onto |phi| <= a
        grad_fwd(g, ubar, dx, dy);
        double excess = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double qx = px[k] + pd.sigma * dx[k];
            double qy = py[k] + pd.sigma * dy[k];
            double m = std::hypot(qx, qy);
            double cap = p.a.v[k];
            if (m > cap) {
                double s = cap / m;
                qx *= s;
                qy *= s;
            }
            px[k] = qx;
            py[k] = qy;
            if (pd.observer) excess = std::max(excess, std::hypot(qx, qy) - cap);
        }
        if (pd.observer) pd.observer(it, excess);

        // primal descent, then re-pin the Dirichlet data
        uprev = u;
        div_bwd(g, px, py, dv);
        for (std::size_t k = 0; k < n; ++k) u[k] += pd.tau * dv[k];
        for (std::size_t k = 0; k < p.f.node.size(); ++k) u[p.f.node[k]] = p.f.value[k];
        for (std::size_t k = 0; k < n; ++k) ubar[k] = u[k] + pd.theta * (u[k] - uprev[k]);

        if ((it + 1) % pd.check_every == 0) {
            GapTerms t = gap_terms(g, p.a, u, px, py);
            // feasible phi: energy - <grad u, phi> >= 0; minimizers stay inside
            // the data's oscillation box, so osc * |div phi|_L1 bounds the rest
            gap = std::max(t.align, 0.0) + osc * t.div_l1;
            e_now = t.energy;
            rel_gap = gap / std::max(std::fabs(t.energy), 1e-30);
            if (rel_gap <= pd.tol_gap) {
                ++it;
                converged = true;
                break;
            }
        }
    }

    LGPSolution sol;
    sol.u = ScalarField(g);
    sol.u.v = u;
    sol.phi = VectorField2(g);
    sol.phi.x = px;
    sol.phi.y = py;

    // node-centered completion of the staggered dual: copy the last interior
    // row/column outward, re-projected so |phi| <= a holds everywhere
    for (int j = 0; j < g.ny; ++j) {
        std::size_t k = g.idx(g.nx - 1, j);
        sol.phi.x[k] = sol.phi.x[g.idx(g.nx - 2, j)];
    }
    for (int i = 0; i < g.nx; ++i) {
        std::size_t k = g.idx(i, g.ny - 1);
        sol.phi.y[k] = sol.phi.y[g.idx(i, g.ny - 2)];
    }
    for (std::size_t k = 0; k < n; ++k) {
        double m = std::hypot(sol.phi.x[k], sol.phi.y[k]);
        double cap = p.a.v[k];
        if (m > cap) {
            double s = cap / m;
            sol.phi.x[k] *= s;
            sol.phi.y[k] *= s;
        }
    }

    if (!converged) {
        GapTerms t = gap_terms(g, p.a, u, px, py);
        gap = std::max(t.align, 0.0) + osc * t.div_l1;
        e_now = t.energy;
    }
    sol.energy = e_now;
    sol.gap = gap;
    sol.iterations = it;
    sol.converged = converged;
    return sol;
}

CertificateReport dual_certificate(const LGPSolution& sol, const LGPProblem& p) {
    const Grid2D& g = p.a.grid;
    CertificateReport rep;

    for (std::size_t k = 0; k < sol.phi.size(); ++k)
        rep.phi_excess = std::max(
            rep.phi_excess, std::hypot(sol.phi.x[k], sol.phi.y[k]) - p.a.v[k]);

    // divergence in the solver's own pairing, interior nodes only
    std::vector<double> dv(g.size());
    div_bwd(g, sol.phi.x, sol.phi.y, dv);
    double s2 = 0.0;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            double d = dv[g.idx(i, j)];
            s2 += d * d;
        }
    rep.div_l2_interior = std::sqrt(s2 * g.hx * g.hy);

    VectorField2 du = gradient(sol.u);
    ScalarField integrand(g);
    for (std::size_t k = 0; k < integrand.size(); ++k)
        integrand.v[k] = p.a.v[k] * std::hypot(du.x[k], du.y[k]) -
                         (sol.phi.x[k] * du.x[k] + sol.phi.y[k] * du.y[k]);
    rep.alignment_residual = integrate(integrand);
    rep.energy_central = energy(p.a, sol.u);
    return rep;
}

double energy(const ScalarField& a, const ScalarField& u) {
    if (!a.grid.same_layout(u.grid)) throw InvalidInput("energy: grid mismatch");
    VectorField2 du = gradient(u);
    ScalarField integrand(a.grid);
    for (std::size_t k = 0; k < integrand.size(); ++k)
        integrand.v[k] = a.v[k] * std::hypot(du.x[k], du.y[k]);
    return integrate(integrand);
}

double alignment_defect(const VectorField2& J, const VectorField2& Jt) {
    if (!J.grid.same_layout(Jt.grid)) throw InvalidInput("alignment_defect: grid mismatch");
    ScalarField integrand(J.grid);
    for (std::size_t k = 0; k < integrand.size(); ++k) {
        double m = std::hypot(J.x[k], J.y[k]) * std::hypot(Jt.x[k], Jt.y[k]);
        integrand.v[k] = m - (J.x[k] * Jt.x[k] + J.y[k] * Jt.y[k]);
    }
    return integrate(integrand);
}

SigmaRecovery recover_sigma(const ScalarField& a, const ScalarField& u, double floor) {
    if (!a.grid.same_layout(u.grid)) throw InvalidInput("recover_sigma: grid mismatch");
    if (!(floor > 0.0)) throw InvalidInput("recover_sigma: floor must be positive");
    SigmaRecovery out;
    out.sigma = ScalarField(a.grid);
    VectorField2 du = gradient(u);
    std::size_t floored = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double m = std::hypot(du.x[k], du.y[k]);
        if (m < floor) {
            m = floor;
            ++floored;
        }
        out.sigma.v[k] = a.v[k] / m;
    }
    out.floored_fraction = double(floored) / double(a.size());
    out.warn = out.floored_fraction > 0.10;
    return out;
}

} // namespace cdii
