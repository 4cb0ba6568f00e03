#include "cdii/level_sets.hpp"

#include "cdii/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace cdii {

namespace {

// Crossing points live on grid edges; an edge is crossed when (u-t) changes
// sign across it. Interior edges collect exactly two incident segments, domain
// boundary edges one, so open chains always terminate on the boundary.

struct Crossing {
    double x, y;
    int nbr[2] = {-1, -1}; // neighbouring crossing ids via segments
    int deg = 0;
};

inline void link(std::vector<Crossing>& cs, int a, int b) {
    cs[a].nbr[cs[a].deg++] = b;
    cs[b].nbr[cs[b].deg++] = a;
}

} // namespace

LevelSet extract_level_set(const ScalarField& u, double t) {
    const Grid2D& g = u.grid;
    LevelSet out;
    out.level = t;

    double lo = u.min(), hi = u.max();
    if (!(t > lo && t < hi)) {
        out.out_of_range = true;
        return out;
    }

    // nudge exact node hits off the level
    std::vector<double> w(u.v);
    double eps = 1e-12 * (hi - lo);
    for (double& v : w)
        if (v == t) v += eps;

    auto above = [&](int i, int j) { return w[g.idx(i, j)] > t; };

    // edge ids: horizontal (i,j)-(i+1,j) then vertical (i,j)-(i,j+1)
    const int H = (g.nx - 1) * g.ny;
    auto he = [&](int i, int j) { return j * (g.nx - 1) + i; };
    auto ve = [&](int i, int j) { return H + j * g.nx + i; };

    std::unordered_map<int, int> edge_to_crossing;
    std::vector<Crossing> cs;
    cs.reserve(256);

    auto crossing_on = [&](int edge, int i0, int j0, int i1, int j1) {
        auto it = edge_to_crossing.find(edge);
        if (it != edge_to_crossing.end()) return it->second;
        double a = w[g.idx(i0, j0)], b = w[g.idx(i1, j1)];
        double s = (t - a) / (b - a);
        Crossing c;
        c.x = g.x(i0) + s * (g.x(i1) - g.x(i0));
        c.y = g.y(j0) + s * (g.y(j1) - g.y(j0));
        int id = int(cs.size());
        cs.push_back(c);
        edge_to_crossing.emplace(edge, id);
        return id;
    };

    for (int j = 0; j < g.ny - 1; ++j) {
        for (int i = 0; i < g.nx - 1; ++i) {
            bool a0 = above(i, j), a1 = above(i + 1, j);
            bool a2 = above(i + 1, j + 1), a3 = above(i, j + 1);
            int n_above = int(a0) + int(a1) + int(a2) + int(a3);
            if (n_above == 0 || n_above == 4) continue;

            int bottom = (a0 != a1) ? crossing_on(he(i, j), i, j, i + 1, j) : -1;
            int right = (a1 != a2) ? crossing_on(ve(i + 1, j), i + 1, j, i + 1, j + 1) : -1;
            int top = (a3 != a2) ? crossing_on(he(i, j + 1), i, j + 1, i + 1, j + 1) : -1;
            int left = (a0 != a3) ? crossing_on(ve(i, j), i, j, i, j + 1) : -1;

            int hit[4], nh = 0;
            if (bottom >= 0) hit[nh++] = bottom;
            if (right >= 0) hit[nh++] = right;
            if (top >= 0) hit[nh++] = top;
            if (left >= 0) hit[nh++] = left;

            if (nh == 2) {
                link(cs, hit[0], hit[1]);
            } else if (nh == 4) {
                // saddle: the cell-center average picks the connected diagonal
                double center = 0.25 * (w[g.idx(i, j)] + w[g.idx(i + 1, j)] +
                                        w[g.idx(i + 1, j + 1)] + w[g.idx(i, j + 1)]);
                if ((center > t) == a0) {
                    link(cs, bottom, right); // arcs cut off corners c1 and c3
                    link(cs, top, left);
                } else {
                    link(cs, left, bottom); // arcs cut off corners c0 and c2
                    link(cs, right, top);
                }
            }
        }
    }

    // walk chains: open ones from degree-1 crossings, then leftover loops
    std::vector<char> used(cs.size(), 0);
    auto walk = [&](int start, bool closed) {
        LevelComponent comp;
        comp.closed = closed;
        int prev = -1, cur = start;
        while (cur >= 0 && !used[cur]) {
            used[cur] = 1;
            comp.px.push_back(cs[cur].x);
            comp.py.push_back(cs[cur].y);
            int nxt = (cs[cur].nbr[0] != prev) ? cs[cur].nbr[0] : cs[cur].nbr[1];
            prev = cur;
            cur = nxt;
        }
        if (closed && comp.px.size() > 2) { // repeat the first vertex to close the loop
            comp.px.push_back(comp.px.front());
            comp.py.push_back(comp.py.front());
        }
        double len = 0.0;
        for (std::size_t k = 1; k < comp.px.size(); ++k)
            len += std::hypot(comp.px[k] - comp.px[k - 1], comp.py[k] - comp.py[k - 1]);
        comp.arclength = len;
        comp.reaches_boundary = !closed;
        return comp;
    };

    for (std::size_t k = 0; k < cs.size(); ++k) {
        if (!used[k] && cs[k].deg == 1) {
            LevelComponent comp = walk(int(k), false);
            // orient from the lexicographically smaller (y, x) boundary endpoint
            std::size_t m = comp.px.size() - 1;
            bool flip = (comp.py[m] < comp.py[0]) ||
                        (comp.py[m] == comp.py[0] && comp.px[m] < comp.px[0]);
            if (flip) {
                std::reverse(comp.px.begin(), comp.px.end());
                std::reverse(comp.py.begin(), comp.py.end());
            }
            out.components.push_back(std::move(comp));
        }
    }
    for (std::size_t k = 0; k < cs.size(); ++k)
        if (!used[k] && cs[k].deg == 2) out.components.push_back(walk(int(k), true));

    return out;
}

LevelSetStats level_set_stats(const ScalarField& u, int n_levels) {
    if (n_levels < 1) throw InvalidInput("level_set_stats: need n_levels >= 1");
    double lo = u.min(), hi = u.max();
    if (!(hi > lo)) throw InvalidInput("level_set_stats: constant field has no level sets");

    LevelSetStats st;
    st.n_levels = n_levels;
    double dt = (hi - lo) / n_levels;
    int reaching = 0;
    for (int k = 0; k < n_levels; ++k) {
        LevelSet ls = extract_level_set(u, lo + (k + 0.5) * dt);
        for (const auto& c : ls.components) {
            st.L_M_hat = std::max(st.L_M_hat, c.arclength);
            ++st.n_components;
            if (c.reaches_boundary) ++reaching;
        }
    }
    st.boundary_reach_fraction =
        st.n_components ? double(reaching) / st.n_components : 0.0;
    return st;
}

namespace {

double point_to_polyline(const LevelComponent& c, double px, double py) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < c.px.size(); ++k) {
        double ax = c.px[k - 1], ay = c.py[k - 1];
        double bx = c.px[k], by = c.py[k];
        double dx = bx - ax, dy = by - ay;
        double L2 = dx * dx + dy * dy;
        double s = L2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / L2 : 0.0;
        s = std::max(0.0, std::min(1.0, s));
        best = std::min(best, std::hypot(px - (ax + s * dx), py - (ay + s * dy)));
    }
    return best;
}

// cumulative arclengths, then positions at m equispaced s in [0, s_max]
std::vector<std::array<double, 2>> resample(const LevelComponent& c, double s_max, int m) {
    std::vector<double> cum(c.px.size(), 0.0);
    for (std::size_t k = 1; k < c.px.size(); ++k)
        cum[k] = cum[k - 1] + std::hypot(c.px[k] - c.px[k - 1], c.py[k] - c.py[k - 1]);
    std::vector<std::array<double, 2>> out(m);
    std::size_t seg = 1;
    for (int q = 0; q < m; ++q) {
        double s = s_max * q / (m - 1);
        while (seg + 1 < cum.size() && cum[seg] < s) ++seg;
        double s0 = cum[seg - 1], s1 = cum[seg];
        double w = (s1 > s0) ? (s - s0) / (s1 - s0) : 0.0;
        w = std::max(0.0, std::min(1.0, w));
        out[q] = {c.px[seg - 1] + w * (c.px[seg] - c.px[seg - 1]),
                  c.py[seg - 1] + w * (c.py[seg] - c.py[seg - 1])};
    }
    return out;
}

std::vector<std::array<double, 2>> unit_tangents(const std::vector<std::array<double, 2>>& p) {
    int m = int(p.size());
    std::vector<std::array<double, 2>> t(m);
    for (int k = 0; k < m; ++k) {
        int a = std::max(0, k - 1), b = std::min(m - 1, k + 1);
        double dx = p[b][0] - p[a][0], dy = p[b][1] - p[a][1];
        double L = std::hypot(dx, dy);
        t[k] = L > 0 ? std::array<double, 2>{dx / L, dy / L} : std::array<double, 2>{0.0, 0.0};
    }
    return t;
}

// the component of {u = level} nearest to (px,py), open components only
const LevelComponent* find_component(const LevelSet& ls, double px, double py, double tol) {
    const LevelComponent* best = nullptr;
    double bd = tol;
    for (const auto& c : ls.components) {
        if (c.closed || c.px.size() < 2) continue;
        double d = point_to_polyline(c, px, py);
        if (d <= bd) {
            bd = d;
            best = &c;
        }
    }
    return best;
}

} // namespace

WellStructuredEstimate well_structured_estimate(const ScalarField& u,
                                                const WellStructuredSpec& spec_in) {
    const Grid2D& g = u.grid;
    WellStructuredSpec spec = spec_in;
    if (spec.offsets.empty())
        spec.offsets = {4.0 * std::min(g.hx, g.hy), 8.0 * std::min(g.hx, g.hy)};
    if (spec.n_arc_samples < 4)
        throw InvalidInput("well_structured_estimate: need n_arc_samples >= 4");
    if (spec.points.empty() || spec.directions.empty())
        throw InvalidInput("well_structured_estimate: empty sample spec");

    WellStructuredEstimate est;
    est.spec = spec;

    VectorField2 du = gradient_onesided2(u);
    ScalarField gx(g), gy(g);
    gx.v = du.x;
    gy.v = du.y;

    const double match_tol = 1.5 * std::max(g.hx, g.hy);

    auto inside = [&](double x, double y) {
        return x >= g.ox && x <= g.x_max() && y >= g.oy && y <= g.y_max();
    };

    for (const auto& p : spec.points) {
        for (const auto& dir : spec.directions) {
            for (double t : spec.offsets) {
                double qx = p[0] + t * dir[0], qy = p[1] + t * dir[1];
                if (!inside(p[0], p[1]) || !inside(qx, qy)) {
                    ++est.skipped;
                    continue;
                }
                if (std::hypot(gx.interp(p[0], p[1]), gy.interp(p[0], p[1])) < spec.min_grad) {
                    ++est.skipped;
                    continue;
                }
                LevelSet base = extract_level_set(u, u.interp(p[0], p[1]));
                LevelSet shift = extract_level_set(u, u.interp(qx, qy));
                if (base.out_of_range || shift.out_of_range) {
                    ++est.skipped;
                    continue;
                }
                const LevelComponent* c0 = find_component(base, p[0], p[1], match_tol);
                const LevelComponent* c1 = find_component(shift, qx, qy, match_tol);
                if (!c0 || !c1 || c0->px.size() < 2 || c1->px.size() < 2) {
                    ++est.skipped;
                    continue;
                }

                // gamma starts at its boundary endpoint by construction; match
                // gamma_t's start to it by endpoint proximity
                double sx = c0->px.front(), sy = c0->py.front();
                double d_front = std::hypot(c1->px.front() - sx, c1->py.front() - sy);
                double d_back = std::hypot(c1->px.back() - sx, c1->py.back() - sy);
                if (std::fabs(d_front - d_back) < t) {
                    ++est.skipped; // ambiguous candidate endpoints
                    continue;
                }
                LevelComponent flipped;
                const LevelComponent* cc1 = c1;
                if (d_back < d_front) {
                    flipped = *c1;
                    std::reverse(flipped.px.begin(), flipped.px.end());
                    std::reverse(flipped.py.begin(), flipped.py.end());
                    cc1 = &flipped;
                }

                double s_max = std::min(c0->arclength, cc1->arclength);
                if (!(s_max > 0)) {
                    ++est.skipped;
                    continue;
                }
                auto r0 = resample(*c0, s_max, spec.n_arc_samples);
                auto r1 = resample(*cc1, s_max, spec.n_arc_samples);
                auto t0 = unit_tangents(r0);
                auto t1 = unit_tangents(r1);
                for (int k = 0; k < spec.n_arc_samples; ++k) {
                    double dp = std::hypot(r1[k][0] - r0[k][0], r1[k][1] - r0[k][1]);
                    double dtg = std::hypot(t1[k][0] - t0[k][0], t1[k][1] - t0[k][1]);
                    est.F_sup_hat = std::max(est.F_sup_hat, dp / t);
                    est.K_hat = std::max(est.K_hat, dtg / t);
                }
                ++est.used;
            }
        }
    }
    if (est.used == 0)
        throw InvalidInput("well_structured_estimate: no usable samples (all skipped)");
    return est;
}

} // namespace cdii
