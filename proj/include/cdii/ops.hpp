#pragma once

// Differential and integral operators on node-centered fields.
//
// gradient/divergence form an exact summation-by-parts pair under the trapezoid
// quadrature: central differences at interior nodes, one-sided closures at the
// boundary rows, so that <grad u, v> = -<u, div v> holds to machine precision
// for every u vanishing on the boundary. gradient_onesided2 trades that duality
// for second-order one-sided boundary rows; it backs pointwise diagnostics
// (admissibility, hessian) where boundary accuracy matters more than adjointness.

#include "cdii/grid.hpp"

namespace cdii {

enum class Lp { L1, L2, Linf };

// SBP gradient: central interior, (u1-u0)/h closures at the boundary.
VectorField2 gradient(const ScalarField& u);

// Central interior, second-order one-sided (-3u0+4u1-u2)/(2h) at the boundary.
VectorField2 gradient_onesided2(const ScalarField& u);

// Componentwise SBP derivative; exact negative adjoint of gradient() on
// boundary-vanishing fields. Annihilates constants at every node.
ScalarField divergence(const VectorField2& v);

// Trapezoid quadrature of f over the rectangle.
double integrate(const ScalarField& f);

// Trapezoid-weighted inner products.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField2& a, const VectorField2& b);

// Trapezoid L1/L2 norms, max-norm for Linf.
double lp_norm(const ScalarField& u, Lp p);
double lp_norm(const VectorField2& u, Lp p); // norms of the pointwise magnitude

// Integral of |u_xx| + 2|u_xy| + |u_yy|, all stencils second-order accurate.
double hessian_l1(const ScalarField& u);

struct CoareaResult {
    double lhs = 0.0;      // trapezoid integral of |grad u|
    double rhs = 0.0;      // sum over levels of contour length * dt
    double rel_gap = 0.0;  // |lhs-rhs| / max(|lhs|, tiny)
    int n_levels = 0;
};

// Coarea identity check: lhs = integral of |grad u|, rhs = midpoint-rule sum of
// total level-set length over n_levels equispaced levels spanning range(u).
// Constant u is rejected (no level structure).
CoareaResult coarea_check(const ScalarField& u, int n_levels);

} // namespace cdii
