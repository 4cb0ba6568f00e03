#pragma once

// Weighted least-gradient problem: minimize integral of a*|grad w| over fields
// with fixed boundary values, by the primal-dual (Chambolle-Pock) scheme with
// pointwise dual ball constraint |phi| <= a. Forward differences drive the
// iteration; reported diagnostics use the central-difference operators.

#include "cdii/forward.hpp"
#include "cdii/grid.hpp"

#include <functional>

namespace cdii {

struct LGPProblem {
    ScalarField a;    // weight, m <= a <= M on nodes
    BoundaryTrace f;  // Dirichlet data
    double m = 0.0, M = 0.0;

    LGPProblem(ScalarField a_, BoundaryTrace f_, double m_, double M_);
};

struct PDParams {
    double theta = 1.0;
    double tau = 0.0, sigma = 0.0; // 0: use 1/sqrt(L2), L2 = 4(1/hx^2+1/hy^2)
    double tol_gap = 1e-6;         // relative primal-dual gap target
    int max_iter = 200000;
    int check_every = 50;
    // test hook: called after each dual projection with max(|phi| - a)
    std::function<void(int iter, double phi_excess)> observer;

    void validate(const Grid2D& g) const;
};

struct LGPSolution {
    ScalarField u;
    VectorField2 phi;   // node-centered dual field, |phi| <= a everywhere
    double energy = 0.0; // converged primal value (forward-difference form)
    double gap = 0.0;    // optimality bound in energy units
    int iterations = 0;
    bool converged = false;
};

// Warm-started from the harmonic extension of f. On hitting max_iter the best
// iterate is returned with converged == false (artifacts remain writable).
LGPSolution solve_lgp(const LGPProblem& p, const PDParams& pd = {});

struct CertificateReport {
    double phi_excess = 0.0;        // max over nodes of |phi| - a
    double div_l2_interior = 0.0;   // L2 of the pairing divergence over interior nodes
    double alignment_residual = 0.0; // integral of a|grad u| - phi . grad u (central)
    double energy_central = 0.0;     // trapezoid/central energy used for the ratio
};

CertificateReport dual_certificate(const LGPSolution& sol, const LGPProblem& p);

// Trapezoid integral of a |grad u| with the central-difference gradient.
double energy(const ScalarField& a, const ScalarField& u);

// Integral of |J||Jt| - J.Jt; pointwise Cauchy-Schwarz keeps the integrand
// nonnegative up to roundoff, so the result is >= -1e-12.
double alignment_defect(const VectorField2& J, const VectorField2& Jt);

struct SigmaRecovery {
    ScalarField sigma;
    double floored_fraction = 0.0; // nodes where |grad u| was below the floor
    bool warn = false;             // floored fraction above 10%
};

// sigma = a / max(|grad u|, floor); floor > 0 required.
SigmaRecovery recover_sigma(const ScalarField& a, const ScalarField& u, double floor);

} // namespace cdii
