#pragma once

// Level-set extraction by marching squares with linear edge interpolation,
// component stitching, arclength statistics, and the level-set flow
// difference-quotient estimator.

#include "cdii/grid.hpp"

#include <array>
#include <vector>

namespace cdii {

struct LevelComponent {
    std::vector<double> px, py; // polyline vertices; open: px[0] on the boundary
    double arclength = 0.0;
    bool closed = false;
    bool reaches_boundary = false; // an endpoint lies on the domain boundary (within h/2)
};

struct LevelSet {
    double level = 0.0;
    bool out_of_range = false; // level outside the open range of u
    std::vector<LevelComponent> components;
};

// Contour of {u = t}. Node values equal to t are nudged by +1e-12*range(u).
// Saddle cells are split by the sign of the cell-center average. Open polylines
// are oriented so the parameterization starts at a boundary endpoint (the
// lexicographically smaller (y,x) endpoint when both reach the boundary).
LevelSet extract_level_set(const ScalarField& u, double t);

struct LevelSetStats {
    double L_M_hat = 0.0;               // max component arclength over sampled levels
    double boundary_reach_fraction = 0; // reaching components / all components
    int n_levels = 0;
    int n_components = 0;
};

// Stats over n_levels midpoint-equispaced levels in the open range of u.
LevelSetStats level_set_stats(const ScalarField& u, int n_levels);

struct WellStructuredSpec {
    std::vector<std::array<double, 2>> points;     // base points x
    std::vector<std::array<double, 2>> directions; // unit directions h
    std::vector<double> offsets;                   // step sizes t (default 4h, 8h)
    int n_arc_samples = 64;                        // arclength resamples per pair
    double min_grad = 1e-10;                       // |grad u| threshold at base points
};

struct WellStructuredEstimate {
    double K_hat = 0.0;     // max |gamma_t'(s) - gamma'(s)| / t over all samples
    double F_sup_hat = 0.0; // max |gamma_t(s) - gamma(s)| / t
    int used = 0;           // (point, direction, offset) triples that contributed
    int skipped = 0;        // skipped triples (closed/missing component, ambiguity, ...)
    WellStructuredSpec spec;
};

// Difference quotients between the level component through x and the one
// through x + t*h, both parameterized by arclength from matched boundary
// endpoints and resampled at n_arc_samples common arclengths. Closed components
// are excluded; ambiguous endpoint matching skips the sample and counts it.
WellStructuredEstimate well_structured_estimate(const ScalarField& u,
                                                const WellStructuredSpec& spec);

} // namespace cdii
