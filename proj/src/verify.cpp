#include "cdii/verify.hpp"

#include "cdii/least_gradient.hpp"
#include "cdii/level_sets.hpp"
#include "cdii/ops.hpp"
#include "cdii/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

namespace cdii {

namespace {

double bump(double x, double y) {
    return std::exp(-50.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
}

double layered_exact(double x) { return std::log1p(x) / std::log(2.0); }

const InequalityCheck& check_by_name(const StabilityReport& rep, const std::string& name) {
    for (const auto& c : rep.checks)
        if (c.name == name) return c;
    throw InvalidInput("no inequality check named " + name);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// max ratio <= 10 x median ratio, ratios over the whole ladder
json plain_boundedness(const StabilityReport& rep, std::function<double(const StabilityRun&)> lhs,
                       std::function<double(const StabilityRun&)> rhs, double alpha,
                       bool& ok) {
    std::vector<double> ratios;
    for (const auto& r : rep.runs)
        if (rhs(r) > 0.0) ratios.push_back(lhs(r) / std::pow(rhs(r), alpha));
    double mx = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    double md = median_of(ratios);
    ok = mx <= 10.0 * md + 1e-300;
    return json{{"max_ratio", mx}, {"median_ratio", md}, {"ok", ok}};
}

CheckResult forward_oracle() {
    CheckResult res;
    res.name = "forward_oracle";

    const int ns[3] = {33, 65, 129};
    std::vector<double> hs, errs;
    json solves = json::array();
    bool runtime_ok = true;
    for (int n : ns) {
        Grid2D g = Grid2D::unit_square(n);
        ConductivityProblem p(
            ScalarField::sample(g, [](double x, double) { return 1.0 + x; }),
            BoundaryTrace::sample(g, [](double x, double) { return layered_exact(x); }));
        auto t0 = std::chrono::steady_clock::now();
        ForwardSolution sol = solve_conductivity(p);
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        double err = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                err = std::max(err, std::fabs(sol.u.at(i, j) - layered_exact(g.x(i))));
        hs.push_back(g.hx);
        errs.push_back(err);
        runtime_ok = runtime_ok && dt <= 5.0;
        res.seconds += dt;
        solves.push_back(json{{"n", n}, {"err_linf", err}, {"iterations", sol.iterations}});
    }
    double p01 = std::log(errs[0] / errs[1]) / std::log(hs[0] / hs[1]);
    double p12 = std::log(errs[1] / errs[2]) / std::log(hs[1] / hs[2]);
    double order = std::min(p01, p12);

    res.pass = errs[2] <= 1e-3 && order >= 1.9 && runtime_ok;
    res.details = json{{"solves", solves},
                       {"err_linf_finest", errs[2]},
                       {"err_tol", 1e-3},
                       {"order_observed", order},
                       {"order_required", 1.9},
                       {"runtime_ok", runtime_ok},
                       {"runtime_budget_seconds", 5.0}};
    return res;
}

CheckResult lgp_exactness() {
    CheckResult res;
    res.name = "lgp_exactness";
    auto t0 = std::chrono::steady_clock::now();

    Grid2D g = Grid2D::unit_square(129);
    LGPProblem p(ScalarField(g, 1.0), two_to_one_trace(g, TraceKind::Linear), 0.5, 2.0);
    LGPSolution sol = solve_lgp(p);
    CertificateReport cert = dual_certificate(sol, p);

    double err = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            err = std::max(err, std::fabs(sol.u.at(i, j) - g.x(i)));

    bool align_ok = cert.alignment_residual <= 1e-3 * cert.energy_central;
    res.pass = err <= 1e-3 && cert.phi_excess <= 1e-8 && cert.div_l2_interior <= 1e-2 &&
               align_ok;
    res.details = json{{"err_linf", err},
                       {"err_tol", 1e-3},
                       {"certificate", to_json(cert)},
                       {"alignment_ok", align_ok},
                       {"iterations", sol.iterations},
                       {"converged", sol.converged}};
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

CheckResult cdii_round_trip() {
    CheckResult res;
    res.name = "cdii_round_trip";
    auto t0 = std::chrono::steady_clock::now();

    Grid2D g = Grid2D::unit_square(129);
    ScalarField sigma =
        ScalarField::sample(g, [](double x, double y) { return 1.0 + 0.5 * bump(x, y); });
    BoundaryTrace f = two_to_one_trace(g, TraceKind::Linear);
    ForwardSolution fwd = solve_conductivity(ConductivityProblem(sigma, f));

    LGPProblem p(fwd.a, f, 0.9 * fwd.a.min(), 1.1 * fwd.a.max());
    LGPSolution sol = solve_lgp(p);
    SigmaRecovery rec = recover_sigma(fwd.a, sol.u, 1e-6);

    ScalarField diff(g);
    for (std::size_t k = 0; k < g.size(); ++k) diff.v[k] = rec.sigma.v[k] - sigma.v[k];
    double rel_l1 = lp_norm(diff, Lp::L1) / lp_norm(sigma, Lp::L1);

    res.pass = rel_l1 <= 0.05 && rec.floored_fraction <= 0.01;
    res.details = json{{"rel_l1", rel_l1},
                       {"rel_l1_tol", 0.05},
                       {"floored_fraction", rec.floored_fraction},
                       {"floored_tol", 0.01},
                       {"lgp_iterations", sol.iterations},
                       {"lgp_gap", sol.gap},
                       {"lgp_converged", sol.converged}};
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

struct Sweeps {
    StabilityReport bump_rep, const_rep;
    double seconds = 0.0;
};

Sweeps run_sweeps() {
    Sweeps s;
    auto t0 = std::chrono::steady_clock::now();

    Grid2D g = Grid2D::unit_square(65);
    ScalarField one(g, 1.0);
    BoundaryTrace f = two_to_one_trace(g, TraceKind::Linear);
    AdmissibilityBounds wide(0.05, 20.0, 0.05, 20.0, 1e9);
    std::vector<double> ladder;
    for (int k = 1; k <= 8; ++k) ladder.push_back(1.0 / double(1 << k));

    PerturbationFamily bump_fam(one, ScalarField::sample(g, bump), ladder, wide);
    s.bump_rep = run_sweep(bump_fam, f);

    PerturbationFamily const_fam(one, ScalarField(g, 1.0), ladder, wide);
    s.const_rep = run_sweep(const_fam, f);

    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

CheckResult defect_and_energy_rates(const Sweeps& s) {
    CheckResult res;
    res.name = "defect_and_energy_rates";

    const InequalityCheck& gap = check_by_name(s.bump_rep, "energy_gap_vs_da");
    const InequalityCheck& def = check_by_name(s.bump_rep, "defect_vs_da");

    bool defects_nonneg = true;
    for (const auto& r : s.bump_rep.runs) defects_nonneg = defects_nonneg && r.defect >= 0.0;
    for (const auto& r : s.const_rep.runs) defects_nonneg = defects_nonneg && r.defect >= 0.0;

    bool gap_ok = !gap.fit.at_noise_floor && gap.fit.slope >= 0.9;
    // a defect channel at solver noise satisfies its upper bound with maximal
    // margin; a rate can only be demanded when the data is above the floor
    bool def_ok = def.fit.at_noise_floor || def.fit.slope >= 0.9;

    res.pass = gap_ok && def_ok && defects_nonneg;
    res.details = json{{"energy_gap_slope", gap.fit.slope},
                       {"defect_slope", def.fit.slope},
                       {"defect_fit_at_noise_floor", def.fit.at_noise_floor},
                       {"slope_required", 0.9},
                       {"defects_nonnegative", defects_nonneg}};
    return res;
}

CheckResult stability_exponents(const Sweeps& s) {
    CheckResult res;
    res.name = "stability_exponents";

    const InequalityCheck& cj = check_by_name(s.bump_rep, "current_l1_vs_da");
    const InequalityCheck& cu = check_by_name(s.bump_rep, "potential_l1_vs_djmag");
    const InequalityCheck& cg = check_by_name(s.bump_rep, "gradient_l1_vs_djmag");
    const InequalityCheck& cs = check_by_name(s.bump_rep, "sigma_l1_vs_djmag");

    bool b1, b2, b3, b4;
    json bounds = json::array();
    bounds.push_back(plain_boundedness(
        s.bump_rep, [](const StabilityRun& r) { return r.e_J; },
        [](const StabilityRun& r) { return r.delta_a; }, 0.5, b1));
    bounds.push_back(plain_boundedness(
        s.bump_rep, [](const StabilityRun& r) { return r.e_u; },
        [](const StabilityRun& r) { return r.delta_jmag; }, 0.5, b2));
    bounds.push_back(plain_boundedness(
        s.bump_rep, [](const StabilityRun& r) { return r.e_grad; },
        [](const StabilityRun& r) { return r.delta_jmag; }, 0.25, b3));
    bounds.push_back(plain_boundedness(
        s.bump_rep, [](const StabilityRun& r) { return r.e_sigma; },
        [](const StabilityRun& r) { return r.delta_jmag; }, 0.25, b4));

    const InequalityCheck& cc = check_by_name(s.const_rep, "sigma_l1_vs_djmag");
    bool const_slope_ok = std::fabs(cc.fit.slope - 1.0) <= 0.05;

    res.pass = cj.fit.slope >= 0.4 && cu.fit.slope >= 0.4 && cg.fit.slope >= 0.15 &&
               cs.fit.slope >= 0.15 && b1 && b2 && b3 && b4 && const_slope_ok;
    res.details = json{{"e_J_slope", cj.fit.slope},
                       {"e_u_slope", cu.fit.slope},
                       {"e_grad_slope", cg.fit.slope},
                       {"e_sigma_slope", cs.fit.slope},
                       {"slope_required", {0.4, 0.4, 0.15, 0.15}},
                       {"boundedness", bounds},
                       {"const_family_sigma_slope", cc.fit.slope},
                       {"const_family_sigma_slope_ok", const_slope_ok}};
    return res;
}

CheckResult reverse_triangle_bounds(const Sweeps& s) {
    CheckResult res;
    res.name = "reverse_triangle_bounds";

    bool ok = true;
    double worst_lo = 0.0, worst_hi = 0.0; // positive values mean violation
    auto scan = [&](const StabilityReport& rep) {
        for (const auto& r : rep.runs) {
            worst_lo = std::max(worst_lo, r.rev_lo - r.e_J);
            worst_hi = std::max(worst_hi, r.e_J - r.rev_hi);
            ok = ok && r.rev_lo <= r.e_J + 1e-12 && r.e_J <= r.rev_hi + 1e-8;
        }
    };
    scan(s.bump_rep);
    scan(s.const_rep);

    res.pass = ok;
    res.details = json{{"worst_lower_violation", worst_lo},
                       {"worst_upper_violation", worst_hi},
                       {"upper_slack", 1e-8}};
    return res;
}

CheckResult interpolation_ratios(const Sweeps& s) {
    CheckResult res;
    res.name = "interpolation_ratios";

    bool finite = true;
    for (const auto& r : s.bump_rep.runs)
        finite = finite && std::isfinite(r.gn_ratio[0]) && std::isfinite(r.gn_ratio[1]);
    for (const auto& r : s.const_rep.runs)
        finite = finite && std::isfinite(r.gn_ratio[0]) && std::isfinite(r.gn_ratio[1]);

    json comp = json::array();
    bool bounded = true;
    for (int c = 0; c < 2; ++c) {
        std::vector<double> ratios;
        for (const auto& r : s.bump_rep.runs) ratios.push_back(r.gn_ratio[c]);
        double mx = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
        double md = median_of(ratios);
        bool ok = mx <= 10.0 * md + 1e-300;
        bounded = bounded && ok;
        comp.push_back(json{{"component", c + 1}, {"max", mx}, {"median", md}, {"ok", ok}});
    }

    res.pass = finite && bounded;
    res.details = json{{"all_finite", finite}, {"bump_family_boundedness", comp}};
    return res;
}

CheckResult level_set_geometry() {
    CheckResult res;
    res.name = "level_set_geometry";
    auto t0 = std::chrono::steady_clock::now();

    // closed circular contour, radius 1/2, circumference pi
    Grid2D gc = Grid2D::unit_square(256);
    ScalarField uc = ScalarField::sample(gc, [](double x, double y) {
        return (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
    });
    LevelSet circ = extract_level_set(uc, 0.25);
    double circ_len = 0.0;
    int closed_components = 0;
    for (const auto& c : circ.components) {
        circ_len += c.arclength;
        if (c.closed) ++closed_components;
    }
    bool circle_ok = std::fabs(circ_len - std::numbers::pi) <= 0.01 * std::numbers::pi && closed_components == 1;

    // layered solve: vertical level lines of unit length, all reaching the boundary
    Grid2D g = Grid2D::unit_square(129);
    ForwardSolution fwd = solve_conductivity(ConductivityProblem(
        ScalarField::sample(g, [](double x, double) { return 1.0 + x; }),
        BoundaryTrace::sample(g, [](double x, double) { return layered_exact(x); })));
    LevelSetStats stats = level_set_stats(fwd.u, 64);
    bool layered_ok =
        std::fabs(stats.L_M_hat - 1.0) <= 0.01 && stats.boundary_reach_fraction == 1.0;

    // coarea identity on smooth benchmarks
    CoareaResult ca1 =
        coarea_check(ScalarField::sample(g, [](double x, double) { return x; }), 64);
    CoareaResult ca2 = coarea_check(
        ScalarField::sample(g, [](double x, double y) { return x * x + y * y; }), 128);
    bool coarea_ok = ca1.rel_gap <= 0.02 && ca2.rel_gap <= 0.02;

    res.pass = circle_ok && layered_ok && coarea_ok;
    res.details = json{{"circle_arclength", circ_len},
                       {"circle_expected", std::numbers::pi},
                       {"circle_closed_components", closed_components},
                       {"layered_stats", to_json(stats)},
                       {"coarea_rel_gap_linear", ca1.rel_gap},
                       {"coarea_rel_gap_paraboloid", ca2.rel_gap},
                       {"coarea_tol", 0.02}};
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

CheckResult well_structured_diagnostics() {
    CheckResult res;
    res.name = "well_structured_diagnostics";

    Grid2D g = Grid2D::unit_square(129);
    ScalarField u = ScalarField::sample(g, [](double x, double) { return x; });
    WellStructuredSpec spec;
    spec.points = {{0.3, 0.5}, {0.5, 0.5}, {0.7, 0.5}};
    spec.directions = {{1.0, 0.0}};
    WellStructuredEstimate est = well_structured_estimate(u, spec);

    res.pass = est.K_hat <= 1e-3 && std::fabs(est.F_sup_hat - 1.0) <= 1e-2 && est.used > 0;
    res.details = json{{"estimate", to_json(est)},
                       {"K_tol", 1e-3},
                       {"F_expected", 1.0},
                       {"F_tol", 1e-2}};
    return res;
}

CheckResult guarded(const char* name, std::function<CheckResult()> f) {
    auto t0 = std::chrono::steady_clock::now();
    try {
        CheckResult r = f();
        if (r.seconds == 0.0)
            r.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    } catch (const std::exception& e) {
        CheckResult r;
        r.name = name;
        r.pass = false;
        r.details = json{{"error", e.what()}};
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
}

} // namespace

VerifySuite run_verification() {
    VerifySuite suite;
    suite.checks.push_back(guarded("forward_oracle", forward_oracle));
    suite.checks.push_back(guarded("lgp_exactness", lgp_exactness));
    suite.checks.push_back(guarded("cdii_round_trip", cdii_round_trip));

    bool sweeps_ok = true;
    Sweeps sweeps;
    try {
        sweeps = run_sweeps();
    } catch (const std::exception& e) {
        sweeps_ok = false;
        for (const char* n : {"defect_and_energy_rates", "stability_exponents",
                              "reverse_triangle_bounds", "interpolation_ratios"}) {
            CheckResult r;
            r.name = n;
            r.details = json{{"error", e.what()}};
            suite.checks.push_back(r);
        }
    }
    if (sweeps_ok) {
        double shared = sweeps.seconds / 4.0;
        const std::pair<const char*, CheckResult (*)(const Sweeps&)> sweep_checks[] = {
            {"defect_and_energy_rates", defect_and_energy_rates},
            {"stability_exponents", stability_exponents},
            {"reverse_triangle_bounds", reverse_triangle_bounds},
            {"interpolation_ratios", interpolation_ratios},
        };
        for (const auto& [name, f] : sweep_checks) {
            CheckResult r = guarded(name, [&, fn = f] { return fn(sweeps); });
            r.seconds += shared;
            suite.checks.push_back(r);
        }
    }

    suite.checks.push_back(guarded("level_set_geometry", level_set_geometry));
    suite.checks.push_back(guarded("well_structured_diagnostics", well_structured_diagnostics));

    suite.all_pass = true;
    for (const auto& c : suite.checks) suite.all_pass = suite.all_pass && c.pass;
    return suite;
}

json to_json(const VerifySuite& s) {
    json checks = json::array();
    for (const auto& c : s.checks)
        checks.push_back(json{{"name", c.name}, {"pass", c.pass}, {"details", c.details}});
    return json{{"checks", checks}, {"all_pass", s.all_pass}};
}

} // namespace cdii
