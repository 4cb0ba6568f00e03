#include "cdii/report.hpp"

#include <cstdio>
#include <fstream>

namespace cdii {

json to_json(const AdmissibilityReport& r) {
    return json{{"a_min", r.a_min},
                {"a_max", r.a_max},
                {"sigma_min", r.sigma_min},
                {"sigma_max", r.sigma_max},
                {"grad_min", r.grad_min},
                {"sigma2_proxy", r.sigma2_proxy},
                {"a_in_band", r.a_in_band},
                {"sigma_in_band", r.sigma_in_band},
                {"grad_positive", r.grad_positive},
                {"grad_zero_nodes", r.grad_zero_nodes}};
}

json to_json(const CertificateReport& r) {
    return json{{"phi_excess", r.phi_excess},
                {"div_l2_interior", r.div_l2_interior},
                {"alignment_residual", r.alignment_residual},
                {"energy_central", r.energy_central}};
}

json to_json(const LevelSetStats& s) {
    return json{{"L_M_hat", s.L_M_hat},
                {"boundary_reach_fraction", s.boundary_reach_fraction},
                {"n_levels", s.n_levels},
                {"n_components", s.n_components}};
}

json to_json(const WellStructuredEstimate& e) {
    return json{{"K_hat", e.K_hat},
                {"F_sup_hat", e.F_sup_hat},
                {"used", e.used},
                {"skipped", e.skipped},
                {"n_arc_samples", e.spec.n_arc_samples},
                {"offsets", e.spec.offsets}};
}

json to_json(const FitResult& f) {
    return json{{"slope", f.slope},
                {"intercept", f.intercept},
                {"residual", f.residual},
                {"n_points", f.n_points},
                {"at_noise_floor", f.at_noise_floor}};
}

json to_json(const InequalityCheck& c) {
    return json{{"name", c.name},
                {"lhs", c.lhs},
                {"rhs", c.rhs},
                {"alpha", c.alpha},
                {"c_hat", c.c_hat},
                {"max_ratio", c.max_ratio},
                {"median_ratio", c.median_ratio},
                {"fit", to_json(c.fit)},
                {"bounded", c.bounded},
                {"pass", c.pass}};
}

json to_json(const StabilityRun& r) {
    return json{{"eps", r.eps},
                {"delta_a", r.delta_a},
                {"delta_jmag", r.delta_jmag},
                {"e_J", r.e_J},
                {"e_u", r.e_u},
                {"e_grad", r.e_grad},
                {"e_sigma", r.e_sigma},
                {"energy_gap", r.energy_gap},
                {"defect", r.defect},
                {"rev_lo", r.rev_lo},
                {"rev_hi", r.rev_hi},
                {"gn_grad", {r.gn_grad[0], r.gn_grad[1]}},
                {"gn_hess", {r.gn_hess[0], r.gn_hess[1]}},
                {"gn_l1", {r.gn_l1[0], r.gn_l1[1]}},
                {"gn_ratio", {r.gn_ratio[0], r.gn_ratio[1]}}};
}

json to_json(const StabilityReport& r) {
    json runs = json::array(), checks = json::array(), excl = json::array();
    for (const auto& run : r.runs) runs.push_back(to_json(run));
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    for (const auto& e : r.excluded) excl.push_back(json{{"eps", e.eps}, {"reason", e.reason}});
    return json{{"linf_convention", "discrete node maxima"},
                {"runs", runs},
                {"excluded", excl},
                {"excluded_fraction", r.excluded_fraction},
                {"family_ok", r.family_ok},
                {"checks", checks},
                {"pass", r.pass}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw InvalidInput("not valid JSON: " + path);
    return j;
}

void write_contours_csv(const std::string& path, const std::vector<LevelSet>& sets) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw InvalidInput("cannot open for writing: " + path);
    std::fprintf(fp, "level,component,closed,vertex,x,y\n");
    for (const auto& ls : sets) {
        for (std::size_t c = 0; c < ls.components.size(); ++c) {
            const auto& comp = ls.components[c];
            for (std::size_t k = 0; k < comp.px.size(); ++k)
                std::fprintf(fp, "%.17g,%zu,%d,%zu,%.17g,%.17g\n", ls.level, c,
                             comp.closed ? 1 : 0, k, comp.px[k], comp.py[k]);
        }
    }
    std::fclose(fp);
}

void write_runs_csv(const std::string& path, const StabilityReport& rep) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw InvalidInput("cannot open for writing: " + path);
    std::fprintf(fp, "eps,delta_a,delta_jmag,e_J,e_u,e_grad,e_sigma,energy_gap,defect,"
                     "rev_lo,rev_hi,gn_grad_1,gn_grad_2,gn_hess_1,gn_hess_2,"
                     "gn_l1_1,gn_l1_2,gn_ratio_1,gn_ratio_2\n");
    for (const auto& r : rep.runs)
        std::fprintf(fp,
                     "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                     "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                     r.eps, r.delta_a, r.delta_jmag, r.e_J, r.e_u, r.e_grad, r.e_sigma,
                     r.energy_gap, r.defect, r.rev_lo, r.rev_hi, r.gn_grad[0], r.gn_grad[1],
                     r.gn_hess[0], r.gn_hess[1], r.gn_l1[0], r.gn_l1[1], r.gn_ratio[0],
                     r.gn_ratio[1]);
    std::fclose(fp);
}

} // namespace cdii
