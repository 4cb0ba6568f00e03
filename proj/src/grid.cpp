#include "cdii/grid.hpp"

#include <algorithm>
#include <cmath>

namespace cdii {

double ScalarField::min() const { return *std::min_element(v.begin(), v.end()); }
double ScalarField::max() const { return *std::max_element(v.begin(), v.end()); }

double ScalarField::interp(double px, double py) const {
    const Grid2D& g = grid;
    double fx = (px - g.ox) / g.hx;
    double fy = (py - g.oy) / g.hy;
    // clamp to the closed rectangle; callers stay inside it
    fx = std::max(0.0, std::min(fx, double(g.nx - 1)));
    fy = std::max(0.0, std::min(fy, double(g.ny - 1)));
    int i = std::min(int(fx), g.nx - 2);
    int j = std::min(int(fy), g.ny - 2);
    double sx = fx - i, sy = fy - j;
    double v00 = at(i, j), v10 = at(i + 1, j), v01 = at(i, j + 1), v11 = at(i + 1, j + 1);
    return (1 - sx) * (1 - sy) * v00 + sx * (1 - sy) * v10 + (1 - sx) * sy * v01 + sx * sy * v11;
}

ScalarField VectorField2::magnitude() const {
    ScalarField m(grid);
    for (std::size_t k = 0; k < x.size(); ++k) m.v[k] = std::hypot(x[k], y[k]);
    return m;
}

BoundaryTrace::BoundaryTrace(const Grid2D& g) : grid(g) {
    node.reserve(g.n_boundary());
    for (int i = 0; i < g.nx; ++i) node.push_back(g.idx(i, 0));
    for (int j = 1; j < g.ny; ++j) node.push_back(g.idx(g.nx - 1, j));
    for (int i = g.nx - 2; i >= 0; --i) node.push_back(g.idx(i, g.ny - 1));
    for (int j = g.ny - 2; j >= 1; --j) node.push_back(g.idx(0, j));
    value.assign(node.size(), 0.0);
}

double BoundaryTrace::min() const { return *std::min_element(value.begin(), value.end()); }
double BoundaryTrace::max() const { return *std::max_element(value.begin(), value.end()); }

void BoundaryTrace::apply_to(ScalarField& u) const {
    if (!u.grid.same_layout(grid)) throw InvalidInput("BoundaryTrace::apply_to: grid mismatch");
    for (std::size_t k = 0; k < node.size(); ++k) u.v[node[k]] = value[k];
}

} // namespace cdii
