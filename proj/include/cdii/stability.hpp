#pragma once

// Perturbation sweeps: solve pairs of forward problems sigma vs sigma_tilde,
// collect the error channels the stability inequalities relate, fit log-log
// exponents over an epsilon ladder, and certify boundedness of LHS/RHS^alpha.

#include "cdii/forward.hpp"
#include "cdii/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cdii {

// Multiplicative family sigma_tilde = sigma (1 + eps eta), eta normalized to
// max-norm 1 at construction. Members violating the sigma band are rejected.
struct PerturbationFamily {
    ScalarField sigma;
    ScalarField eta;
    std::vector<double> epsilons;
    AdmissibilityBounds bounds;

    PerturbationFamily(ScalarField sigma_, ScalarField eta_, std::vector<double> eps,
                       AdmissibilityBounds b);

    ScalarField member(double eps) const; // throws InvalidInput naming the bound
};

struct StabilityRun {
    double eps = 0.0;
    double delta_a = 0.0;     // max-norm of a - a_tilde
    double delta_jmag = 0.0;  // max-norm of |J| - |J_tilde| (coincides with delta_a)
    double e_J = 0.0;         // L1 of |J - J_tilde|
    double e_u = 0.0;         // L1 of u - u_tilde
    double e_grad = 0.0;      // L1 of |grad u - grad u_tilde|
    double e_sigma = 0.0;     // L1 of sigma - sigma_tilde
    double energy_gap = 0.0;  // |E(a,u) - E(a_tilde,u_tilde)|
    double defect = 0.0;      // alignment defect, clamped at 0
    double rev_lo = 0.0;      // L1 of ||J|-|J_tilde||
    double rev_hi = 0.0;      // rev_lo + L1 of sqrt(2 * pointwise defect)
    // Gagliardo-Nirenberg data for G = (J_tilde - J) / sigma_tilde
    double gn_grad[2] = {0, 0}; // L1 of |grad G_i|
    double gn_hess[2] = {0, 0}; // hessian_l1(G_i)
    double gn_l1[2] = {0, 0};   // L1 of G_i
    double gn_ratio[2] = {0, 0};
};

struct SolverParams {
    double tol = 1e-10;
    int max_iter = 0;
};

// Solves both problems and fills every channel. Admissibility failure of either
// member (sigma band, current band) throws InvalidInput naming the bound.
StabilityRun run_pair(const ScalarField& sigma, const ScalarField& sigma_tilde,
                      const BoundaryTrace& f, const AdmissibilityBounds& b,
                      const SolverParams& sp = {});

// Same, reusing a precomputed base solution (the sweep path).
StabilityRun run_pair_with_base(const ForwardSolution& base, const ScalarField& sigma,
                                const ScalarField& sigma_tilde, const BoundaryTrace& f,
                                const AdmissibilityBounds& b, const SolverParams& sp = {});

struct FitResult {
    double slope = 0.0, intercept = 0.0, residual = 0.0; // RMS misfit in log space
    int n_points = 0;
    bool at_noise_floor = false; // too few points above the floor to fit
};

// Least squares on (log x, log y); requires >= 4 strictly positive pairs.
FitResult fit_exponent(const std::vector<double>& xs, const std::vector<double>& ys);

double gn_ratio(double grad_l1, double hess_l1, double g_l1, double noise_floor = 1e-8);

struct InequalityCheck {
    std::string name;
    std::string lhs, rhs; // channel labels; rhs names the norm the statement uses
    double alpha = 0.0;
    double c_hat = 0.0;      // max over runs of LHS / RHS^alpha
    double max_ratio = 0.0;
    double median_ratio = 0.0;
    FitResult fit;
    bool bounded = false; // max_ratio <= bounded_factor * median_ratio
    bool pass = false;    // bounded and (slope >= alpha - slack or at noise floor)
};

struct Exclusion {
    double eps = 0.0;
    std::string reason;
};

struct SweepParams {
    SolverParams solver;
    int fit_window = 5;          // fit over the smallest epsilons
    double noise_floor = 1e-8;   // solver noise level for degenerate channels
    double slope_slack = 0.1;    // require slope >= alpha - slack
    double bounded_factor = 10.0;
};

struct StabilityReport {
    std::vector<StabilityRun> runs; // ordered by the family's epsilon list
    std::vector<Exclusion> excluded;
    std::vector<InequalityCheck> checks;
    double excluded_fraction = 0.0;
    bool family_ok = false; // excluded_fraction <= 0.25
    bool pass = false;      // family_ok and every check passes
};

StabilityReport run_sweep(const PerturbationFamily& fam, const BoundaryTrace& f,
                          const SweepParams& sp = {});

} // namespace cdii
