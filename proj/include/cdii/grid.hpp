#pragma once

// Node-centered uniform Cartesian grid on a rectangle, plus the scalar and
// vector fields living on it. Storage is row-major with the bottom row first:
// value(i,j) = data[j*nx + i], x index i fastest.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdii {

// Thrown when user-supplied data violates a precondition (CLI maps this to exit 2).
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative solver fails to reach its tolerance (carries best residual).
struct SolveFailure : std::runtime_error {
    double best_residual;
    SolveFailure(const std::string& what, double r)
        : std::runtime_error(what), best_residual(r) {}
};

struct Grid2D {
    int nx = 0, ny = 0;        // node counts, >= 3 each
    double hx = 0.0, hy = 0.0; // spacings, > 0
    double ox = 0.0, oy = 0.0; // coordinates of node (0,0)

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double hx_, double hy_, double ox_ = 0.0, double oy_ = 0.0)
        : nx(nx_), ny(ny_), hx(hx_), hy(hy_), ox(ox_), oy(oy_) {
        if (nx < 3 || ny < 3) throw InvalidInput("Grid2D: need nx >= 3 and ny >= 3");
        if (!(hx > 0.0) || !(hy > 0.0)) throw InvalidInput("Grid2D: need hx > 0 and hy > 0");
    }

    // Unit-square helper: n x n nodes on [0,1]^2, h = 1/(n-1).
    static Grid2D unit_square(int n) {
        return Grid2D(n, n, 1.0 / (n - 1), 1.0 / (n - 1), 0.0, 0.0);
    }
    static Grid2D box(int nx_, int ny_, double x0, double x1, double y0, double y1) {
        return Grid2D(nx_, ny_, (x1 - x0) / (nx_ - 1), (y1 - y0) / (ny_ - 1), x0, y0);
    }

    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
    std::size_t idx(int i, int j) const { return std::size_t(j) * nx + i; }
    double x(int i) const { return ox + i * hx; }
    double y(int j) const { return oy + j * hy; }
    bool is_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
    }
    int n_boundary() const { return 2 * (nx + ny) - 4; }
    double x_max() const { return ox + (nx - 1) * hx; }
    double y_max() const { return oy + (ny - 1) * hy; }
    double area() const { return (nx - 1) * hx * (ny - 1) * hy; }

    bool same_layout(const Grid2D& o) const {
        return nx == o.nx && ny == o.ny && hx == o.hx && hy == o.hy && ox == o.ox && oy == o.oy;
    }
};

struct ScalarField {
    Grid2D grid;
    std::vector<double> v; // size nx*ny

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

    double& at(int i, int j) { return v[grid.idx(i, j)]; }
    double at(int i, int j) const { return v[grid.idx(i, j)]; }
    std::size_t size() const { return v.size(); }

    double min() const;
    double max() const;

    // Evaluate f(x,y) at every node.
    template <class F>
    static ScalarField sample(const Grid2D& g, F&& f) {
        ScalarField s(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                s.v[g.idx(i, j)] = f(g.x(i), g.y(j));
        return s;
    }

    // Bilinear interpolation at an interior point of the grid's rectangle.
    double interp(double x, double y) const;
};

struct VectorField2 {
    Grid2D grid;
    std::vector<double> x, y; // components, each size nx*ny

    VectorField2() = default;
    explicit VectorField2(const Grid2D& g) : grid(g), x(g.size(), 0.0), y(g.size(), 0.0) {}

    std::size_t size() const { return x.size(); }

    ScalarField magnitude() const; // pointwise Euclidean norm
};

// Values on the boundary cycle, counterclockwise from node (0,0):
// bottom row i=0..nx-1, right column j=1..ny-1, top row i=nx-2..0, left column j=ny-2..1.
// Each boundary node appears exactly once; entry k pairs the flat node index with a value.
struct BoundaryTrace {
    Grid2D grid;
    std::vector<std::size_t> node; // flat indices, CCW order
    std::vector<double> value;

    BoundaryTrace() = default;
    explicit BoundaryTrace(const Grid2D& g);

    std::size_t size() const { return node.size(); }

    // Sample f(x,y) along the cycle.
    template <class F>
    static BoundaryTrace sample(const Grid2D& g, F&& f) {
        BoundaryTrace t(g);
        for (std::size_t k = 0; k < t.node.size(); ++k) {
            std::size_t p = t.node[k];
            int i = int(p % g.nx), j = int(p / g.nx);
            t.value[k] = f(g.x(i), g.y(j));
        }
        return t;
    }

    double min() const;
    double max() const;

    // Scatter the trace onto a full field's boundary nodes (interior untouched).
    void apply_to(ScalarField& u) const;
};

} // namespace cdii
