#pragma once

// Dirichlet forward problem for div(sigma grad u) = 0 on the grid rectangle:
// conservative 5-point stencil with harmonic-mean face conductivities, boundary
// rows eliminated, preconditioned conjugate gradients on the SPD interior system.

#include "cdii/grid.hpp"

namespace cdii {

struct AdmissibilityBounds {
    double m = 0.0, M = 0.0;       // current-magnitude band: m <= a <= M
    double sigma0 = 0.0, sigma1 = 0.0; // conductivity band: sigma0 < sigma <= sigma1
    double sigma2 = 0.0;           // discrete C^2 proxy bound, >= sigma1

    AdmissibilityBounds() = default;
    AdmissibilityBounds(double m_, double M_, double s0, double s1, double s2)
        : m(m_), M(M_), sigma0(s0), sigma1(s1), sigma2(s2) {
        if (!(0.0 < m && m <= M)) throw InvalidInput("AdmissibilityBounds: need 0 < m <= M");
        if (!(0.0 < sigma0 && sigma0 <= sigma1 && sigma1 <= sigma2))
            throw InvalidInput("AdmissibilityBounds: need 0 < sigma0 <= sigma1 <= sigma2");
    }
};

// max over nodes of |sigma| + |grad sigma| + (|sxx| + 2|sxy| + |syy|), the
// finite-difference stand-in for a C^2 bound
double c2_proxy(const ScalarField& sigma);

struct ConductivityProblem {
    ScalarField sigma;
    BoundaryTrace f;
    double tol = 1e-10;  // relative residual target
    int max_iter = 0;    // 0: pick from grid size

    ConductivityProblem(ScalarField s, BoundaryTrace bc);
};

struct ForwardSolution {
    ScalarField u;
    VectorField2 J;      // -sigma grad u
    ScalarField a;       // |J|
    double residual_norm = 0.0; // relative algebraic residual
    int iterations = 0;
};

// Errors: non-positive sigma rejected (InvalidInput); PCG not reaching tol
// within the iteration cap throws SolveFailure carrying the best residual.
ForwardSolution solve_conductivity(const ConductivityProblem& p);

struct AdmissibilityReport {
    double a_min = 0.0, a_max = 0.0;
    double sigma_min = 0.0, sigma_max = 0.0;
    double grad_min = 0.0;          // min |grad u|, second-order boundary stencils
    double sigma2_proxy = 0.0;
    bool a_in_band = false;         // m <= a <= M everywhere
    bool sigma_in_band = false;     // sigma0 < sigma <= sigma1 everywhere
    bool grad_positive = false;     // min |grad u| > 1e-10
    int grad_zero_nodes = 0;        // nodes with |grad u| <= 1e-10
};

// Report-only: flags violations, never throws on them.
AdmissibilityReport admissibility_check(const ForwardSolution& sol, const ScalarField& sigma,
                                        const AdmissibilityBounds& b);

enum class TraceKind { Linear, TiltedLinear };

// Boundary data with exactly two extrema on the boundary cycle:
// linear: f = x;  tilted-linear: f = cos(theta) x + sin(theta) y.
BoundaryTrace two_to_one_trace(const Grid2D& g, TraceKind kind, double theta = 0.0);

// Local extrema of the cyclic boundary sequence after compressing plateaus.
int count_boundary_extrema(const BoundaryTrace& f);

} // namespace cdii
