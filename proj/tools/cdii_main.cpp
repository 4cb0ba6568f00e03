// Command-line front end: forward solves, least-gradient solves, conductivity
// reconstruction, level-set analysis, perturbation sweeps, and the built-in
// verification suite. Every run writes its artifacts plus a manifest into one
// output directory; reruns with the same inputs produce byte-identical files
// apart from the manifest's timestamp.

#include "cdii/expr.hpp"
#include "cdii/forward.hpp"
#include "cdii/io.hpp"
#include "cdii/least_gradient.hpp"
#include "cdii/level_sets.hpp"
#include "cdii/ops.hpp"
#include "cdii/report.hpp"
#include "cdii/stability.hpp"
#include "cdii/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cdii;

namespace {

constexpr int EXIT_INTERNAL = 1, EXIT_BAD_INPUT = 2, EXIT_CHECKS_FAILED = 3;

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

// --out wins; otherwise a timestamped directory under $CDII_OUT_ROOT or ./runs
fs::path make_out_dir(const std::string& out_flag, const std::string& subcommand) {
    fs::path dir;
    if (!out_flag.empty()) {
        dir = out_flag;
    } else {
        const char* root = std::getenv("CDII_OUT_ROOT");
        dir = fs::path(root ? root : "runs") / (subcommand + "-" + utc_timestamp());
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidInput("cannot create output directory " + dir.string());
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const json& config,
                    const std::vector<std::string>& outputs) {
    json m{{"timestamp", utc_timestamp()},
           {"subcommand", subcommand},
           {"config", config},
           {"outputs", outputs}};
    write_json((dir / "manifest.json").string(), m);
}

// flags win over config file entries; defaults fill the rest
template <class T>
void cfg_fill(const CLI::Option* opt, const json& cfg, const char* key, T& val) {
    if (opt && opt->count() > 0) return;
    if (cfg.contains(key)) val = cfg[key].get<T>();
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return read_json(path);
}

// boundary data: "linear" (x), "tilted:theta" (cos t x + sin t y),
// "layered" (the layered-conductivity benchmark trace), "expr:<expression>"
BoundaryTrace make_trace(const Grid2D& g, const std::string& kind) {
    if (kind == "linear") return two_to_one_trace(g, TraceKind::Linear);
    if (kind.rfind("tilted", 0) == 0) {
        double theta = 0.5;
        if (kind.size() > 7 && kind[6] == ':') theta = std::stod(kind.substr(7));
        return two_to_one_trace(g, TraceKind::TiltedLinear, theta);
    }
    if (kind == "layered")
        return BoundaryTrace::sample(
            g, [](double x, double) { return std::log1p(x) / std::log(2.0); });
    if (kind.rfind("expr:", 0) == 0) {
        Expr e = Expr::parse(kind.substr(5));
        return BoundaryTrace::sample(g, [&](double x, double y) { return e.eval(x, y); });
    }
    throw InvalidInput("unknown boundary data kind '" + kind +
                       "' (want linear, tilted[:theta], layered, expr:<expression>)");
}

struct CommonFlags {
    std::string config_path, out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& cf) {
    cmd->add_option("--config", cf.config_path, "JSON config file; explicit flags win");
    cmd->add_option("--out", cf.out_dir,
                    "output directory (default: $CDII_OUT_ROOT or ./runs, timestamped)");
}

// ---------------------------------------------------------------- forward

int cmd_forward(const CommonFlags& cf, const CLI::App* cmd, std::string sigma_expr,
                std::string f_kind, int n, double tol, int max_iter) {
    json cfg = load_config(cf.config_path);
    cfg_fill(cmd->get_option("--sigma"), cfg, "sigma", sigma_expr);
    cfg_fill(cmd->get_option("--f"), cfg, "f", f_kind);
    cfg_fill(cmd->get_option("--n"), cfg, "n", n);
    cfg_fill(cmd->get_option("--tol"), cfg, "tol", tol);
    cfg_fill(cmd->get_option("--max-iter"), cfg, "max_iter", max_iter);

    Grid2D g = Grid2D::unit_square(n);
    ScalarField sigma = Expr::parse(sigma_expr).sample(g);
    BoundaryTrace f = make_trace(g, f_kind);

    ConductivityProblem p(sigma, f);
    p.tol = tol;
    p.max_iter = max_iter;
    ForwardSolution sol = solve_conductivity(p);

    AdmissibilityBounds b(1e-6, 1e6, 1e-6, 1e6, 1e12);
    AdmissibilityReport rep = admissibility_check(sol, sigma, b);

    fs::path dir = make_out_dir(cf.out_dir, "forward");
    write_grid_text((dir / "u.txt").string(), sol.u);
    ScalarField jx(g), jy(g);
    jx.v = sol.J.x;
    jy.v = sol.J.y;
    write_grid_text((dir / "jx.txt").string(), jx);
    write_grid_text((dir / "jy.txt").string(), jy);
    write_grid_text((dir / "a.txt").string(), sol.a);
    write_grid_text((dir / "sigma.txt").string(), sigma);
    write_trace_csv((dir / "f.csv").string(), f);

    json meta{{"residual_norm", sol.residual_norm},
              {"iterations", sol.iterations},
              {"admissibility", to_json(rep)}};
    write_json((dir / "meta.json").string(), meta);

    json config{{"sigma", sigma_expr}, {"f", f_kind},       {"n", n},
                {"tol", tol},          {"max_iter", max_iter}};
    write_manifest(dir, "forward", config,
                   {"u.txt", "jx.txt", "jy.txt", "a.txt", "sigma.txt", "f.csv", "meta.json"});
    std::printf("forward: n=%d iterations=%d residual=%.3e -> %s\n", n, sol.iterations,
                sol.residual_norm, dir.string().c_str());
    return 0;
}

// ---------------------------------------------------------------- lgp

struct LgpInputs {
    ScalarField a;
    BoundaryTrace f;
};

LgpInputs lgp_inputs(const std::string& a_file, const std::string& f_file,
                     const std::string& a_expr, const std::string& f_kind, int n) {
    if (!a_file.empty()) {
        ScalarField a = read_grid_text(a_file);
        if (f_file.empty())
            throw InvalidInput("--a requires --f-file with the matching boundary trace");
        BoundaryTrace f = read_trace_csv(f_file, a.grid);
        return {std::move(a), std::move(f)};
    }
    Grid2D g = Grid2D::unit_square(n);
    return {Expr::parse(a_expr).sample(g), make_trace(g, f_kind)};
}

int solve_and_write_lgp(const fs::path& dir, const LgpInputs& in, double m, double M,
                        double tol_gap, int max_iter, json config) {
    if (m <= 0.0) m = 0.9 * in.a.min();
    if (M <= 0.0) M = 1.1 * in.a.max();
    LGPProblem p(in.a, in.f, m, M);
    PDParams pd;
    pd.tol_gap = tol_gap;
    pd.max_iter = max_iter;
    LGPSolution sol = solve_lgp(p, pd);
    CertificateReport cert = dual_certificate(sol, p);

    write_grid_text((dir / "u.txt").string(), sol.u);
    ScalarField px(in.a.grid), py(in.a.grid);
    px.v = sol.phi.x;
    py.v = sol.phi.y;
    write_grid_text((dir / "phix.txt").string(), px);
    write_grid_text((dir / "phiy.txt").string(), py);

    config["m"] = m;
    config["M"] = M;
    json meta{{"energy", sol.energy},
              {"gap", sol.gap},
              {"iterations", sol.iterations},
              {"converged", sol.converged},
              {"certificate", to_json(cert)}};
    write_json((dir / "certificate.json").string(), meta);
    write_manifest(dir, "lgp", config, {"u.txt", "phix.txt", "phiy.txt", "certificate.json"});
    std::printf("lgp: iterations=%d gap=%.3e converged=%s -> %s\n", sol.iterations, sol.gap,
                sol.converged ? "true" : "false", dir.string().c_str());
    return sol.converged ? 0 : EXIT_CHECKS_FAILED;
}

int cmd_lgp(const CommonFlags& cf, const CLI::App* cmd, std::string a_file, std::string f_file,
            std::string a_expr, std::string f_kind, int n, double m, double M, double tol_gap,
            int max_iter) {
    json cfg = load_config(cf.config_path);
    cfg_fill(cmd->get_option("--a"), cfg, "a", a_file);
    cfg_fill(cmd->get_option("--f-file"), cfg, "f_file", f_file);
    cfg_fill(cmd->get_option("--a-expr"), cfg, "a_expr", a_expr);
    cfg_fill(cmd->get_option("--f"), cfg, "f", f_kind);
    cfg_fill(cmd->get_option("--n"), cfg, "n", n);
    cfg_fill(cmd->get_option("--m"), cfg, "m", m);
    cfg_fill(cmd->get_option("--M"), cfg, "M", M);
    cfg_fill(cmd->get_option("--tol-gap"), cfg, "tol_gap", tol_gap);
    cfg_fill(cmd->get_option("--max-iter"), cfg, "max_iter", max_iter);

    LgpInputs in = lgp_inputs(a_file, f_file, a_expr, f_kind, n);
    fs::path dir = make_out_dir(cf.out_dir, "lgp");
    json config{{"a", a_file},           {"f_file", f_file}, {"a_expr", a_expr},
                {"f", f_kind},           {"n", n},           {"tol_gap", tol_gap},
                {"max_iter", max_iter}};
    return solve_and_write_lgp(dir, in, m, M, tol_gap, max_iter, std::move(config));
}

// ---------------------------------------------------------------- reconstruct

int cmd_reconstruct(const CommonFlags& cf, const CLI::App* cmd, std::string a_file,
                    std::string f_file, std::string sigma_expr, std::string f_kind, int n,
                    double tol_gap, int max_iter, double floor) {
    json cfg = load_config(cf.config_path);
    cfg_fill(cmd->get_option("--a"), cfg, "a", a_file);
    cfg_fill(cmd->get_option("--f-file"), cfg, "f_file", f_file);
    cfg_fill(cmd->get_option("--sigma"), cfg, "sigma", sigma_expr);
    cfg_fill(cmd->get_option("--f"), cfg, "f", f_kind);
    cfg_fill(cmd->get_option("--n"), cfg, "n", n);
    cfg_fill(cmd->get_option("--tol-gap"), cfg, "tol_gap", tol_gap);
    cfg_fill(cmd->get_option("--max-iter"), cfg, "max_iter", max_iter);
    cfg_fill(cmd->get_option("--floor"), cfg, "floor", floor);

    // measured data: either from files, or generated by an internal forward run
    ScalarField a;
    BoundaryTrace f;
    ScalarField sigma_true;
    ScalarField u_true;
    bool have_truth = false;
    if (!a_file.empty()) {
        a = read_grid_text(a_file);
        if (f_file.empty())
            throw InvalidInput("--a requires --f-file with the matching boundary trace");
        f = read_trace_csv(f_file, a.grid);
    } else {
        Grid2D g = Grid2D::unit_square(n);
        sigma_true = Expr::parse(sigma_expr).sample(g);
        f = make_trace(g, f_kind);
        ForwardSolution fwd = solve_conductivity(ConductivityProblem(sigma_true, f));
        a = fwd.a;
        u_true = fwd.u;
        have_truth = true;
    }

    LGPProblem p(a, f, 0.9 * a.min(), 1.1 * a.max());
    PDParams pd;
    pd.tol_gap = tol_gap;
    pd.max_iter = max_iter;
    LGPSolution sol = solve_lgp(p, pd);
    CertificateReport cert = dual_certificate(sol, p);
    SigmaRecovery rec = recover_sigma(a, sol.u, floor);

    fs::path dir = make_out_dir(cf.out_dir, "reconstruct");
    write_grid_text((dir / "u_hat.txt").string(), sol.u);
    write_grid_text((dir / "sigma_hat.txt").string(), rec.sigma);

    json report{{"lgp", json{{"energy", sol.energy},
                             {"gap", sol.gap},
                             {"iterations", sol.iterations},
                             {"converged", sol.converged}}},
                {"certificate", to_json(cert)},
                {"floored_fraction", rec.floored_fraction},
                {"floor_warn", rec.warn}};
    if (have_truth) {
        const Grid2D& g = a.grid;
        ScalarField ds(g), du(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            ds.v[k] = rec.sigma.v[k] - sigma_true.v[k];
            du.v[k] = sol.u.v[k] - u_true.v[k];
        }
        report["errors"] = json{{"sigma_rel_l1", lp_norm(ds, Lp::L1) / lp_norm(sigma_true, Lp::L1)},
                                {"sigma_linf", lp_norm(ds, Lp::Linf)},
                                {"u_rel_l1", lp_norm(du, Lp::L1) /
                                                 std::max(lp_norm(u_true, Lp::L1), 1e-300)},
                                {"u_linf", lp_norm(du, Lp::Linf)}};
    }
    write_json((dir / "report.json").string(), report);

    json config{{"a", a_file},     {"f_file", f_file},     {"sigma", sigma_expr},
                {"f", f_kind},     {"n", n},               {"tol_gap", tol_gap},
                {"max_iter", max_iter}, {"floor", floor}};
    write_manifest(dir, "reconstruct", config,
                   {"u_hat.txt", "sigma_hat.txt", "report.json"});
    std::printf("reconstruct: iterations=%d gap=%.3e converged=%s floored=%.2e -> %s\n",
                sol.iterations, sol.gap, sol.converged ? "true" : "false",
                rec.floored_fraction, dir.string().c_str());
    return sol.converged ? 0 : EXIT_CHECKS_FAILED;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const CommonFlags& cf, const CLI::App* cmd, std::string sigma_expr,
              std::string eta_expr, std::string f_kind, int n, std::vector<double> epsilons,
              double m, double M, double sigma0, double sigma1, double sigma2, double tol,
              int fit_window, double noise_floor, double slope_slack, double bounded_factor) {
    json cfg = load_config(cf.config_path);
    cfg_fill(cmd->get_option("--sigma"), cfg, "sigma", sigma_expr);
    cfg_fill(cmd->get_option("--eta"), cfg, "eta", eta_expr);
    cfg_fill(cmd->get_option("--f"), cfg, "f", f_kind);
    cfg_fill(cmd->get_option("--n"), cfg, "n", n);
    cfg_fill(cmd->get_option("--epsilons"), cfg, "epsilons", epsilons);
    cfg_fill(cmd->get_option("--m"), cfg, "m", m);
    cfg_fill(cmd->get_option("--M"), cfg, "M", M);
    cfg_fill(cmd->get_option("--sigma0"), cfg, "sigma0", sigma0);
    cfg_fill(cmd->get_option("--sigma1"), cfg, "sigma1", sigma1);
    cfg_fill(cmd->get_option("--sigma2"), cfg, "sigma2", sigma2);
    cfg_fill(cmd->get_option("--tol"), cfg, "tol", tol);
    cfg_fill(cmd->get_option("--fit-window"), cfg, "fit_window", fit_window);
    cfg_fill(cmd->get_option("--noise-floor"), cfg, "noise_floor", noise_floor);
    cfg_fill(cmd->get_option("--slope-slack"), cfg, "slope_slack", slope_slack);
    cfg_fill(cmd->get_option("--bounded-factor"), cfg, "bounded_factor", bounded_factor);

    if (epsilons.empty())
        for (int k = 1; k <= 8; ++k) epsilons.push_back(1.0 / double(1 << k));

    Grid2D g = Grid2D::unit_square(n);
    PerturbationFamily fam(Expr::parse(sigma_expr).sample(g), Expr::parse(eta_expr).sample(g),
                           epsilons, AdmissibilityBounds(m, M, sigma0, sigma1, sigma2));
    BoundaryTrace f = make_trace(g, f_kind);

    SweepParams sp;
    sp.solver.tol = tol;
    sp.fit_window = fit_window;
    sp.noise_floor = noise_floor;
    sp.slope_slack = slope_slack;
    sp.bounded_factor = bounded_factor;
    StabilityReport rep = run_sweep(fam, f, sp);

    for (const auto& r : rep.runs)
        std::printf("eps=%-12.6g delta_a=%-12.6g e_J=%-12.6g e_u=%-12.6g e_sigma=%-12.6g\n",
                    r.eps, r.delta_a, r.e_J, r.e_u, r.e_sigma);
    for (const auto& e : rep.excluded)
        std::printf("excluded eps=%g: %s\n", e.eps, e.reason.c_str());
    for (const auto& c : rep.checks)
        std::printf("%-24s slope=%-8.3f c_hat=%-10.4g bounded=%d pass=%d\n", c.name.c_str(),
                    c.fit.slope, c.c_hat, int(c.bounded), int(c.pass));

    fs::path dir = make_out_dir(cf.out_dir, "sweep");
    write_json((dir / "report.json").string(), to_json(rep));
    write_runs_csv((dir / "runs.csv").string(), rep);

    json config{{"sigma", sigma_expr},
                {"eta", eta_expr},
                {"f", f_kind},
                {"n", n},
                {"epsilons", epsilons},
                {"m", m},
                {"M", M},
                {"sigma0", sigma0},
                {"sigma1", sigma1},
                {"sigma2", sigma2},
                {"tol", tol},
                {"fit_window", fit_window},
                {"noise_floor", noise_floor},
                {"slope_slack", slope_slack},
                {"bounded_factor", bounded_factor}};
    write_manifest(dir, "sweep", config, {"report.json", "runs.csv"});
    std::printf("sweep: %zu runs, %zu excluded, pass=%s -> %s\n", rep.runs.size(),
                rep.excluded.size(), rep.pass ? "true" : "false", dir.string().c_str());
    return rep.pass ? 0 : EXIT_CHECKS_FAILED;
}

// ---------------------------------------------------------------- levelsets

std::vector<std::array<double, 2>> parse_pairs(const std::string& s) {
    std::vector<std::array<double, 2>> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t semi = s.find(';', pos);
        std::string tok = s.substr(pos, semi == std::string::npos ? semi : semi - pos);
        std::size_t comma = tok.find(',');
        if (comma == std::string::npos)
            throw InvalidInput("expected 'x,y[;x,y...]' but got '" + s + "'");
        out.push_back({std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1))});
        if (semi == std::string::npos) break;
        pos = semi + 1;
    }
    if (out.empty()) throw InvalidInput("expected 'x,y[;x,y...]' but got '" + s + "'");
    return out;
}

int cmd_levelsets(const CommonFlags& cf, const CLI::App* cmd, std::string u_file,
                  std::string u_expr, int n, int n_levels, std::vector<double> levels,
                  bool well_structured, std::string points_s, std::string dirs_s,
                  std::vector<double> offsets) {
    json cfg = load_config(cf.config_path);
    cfg_fill(cmd->get_option("--u"), cfg, "u", u_file);
    cfg_fill(cmd->get_option("--u-expr"), cfg, "u_expr", u_expr);
    cfg_fill(cmd->get_option("--n"), cfg, "n", n);
    cfg_fill(cmd->get_option("--levels"), cfg, "levels", n_levels);
    cfg_fill(cmd->get_option("--level"), cfg, "level", levels);
    cfg_fill(cmd->get_option("--points"), cfg, "points", points_s);
    cfg_fill(cmd->get_option("--dirs"), cfg, "dirs", dirs_s);
    cfg_fill(cmd->get_option("--offsets"), cfg, "offsets", offsets);
    if (cmd->get_option("--well-structured")->count() == 0 && cfg.contains("well_structured"))
        well_structured = cfg["well_structured"].get<bool>();

    ScalarField u =
        !u_file.empty() ? read_grid_text(u_file) : Expr::parse(u_expr).sample(Grid2D::unit_square(n));

    LevelSetStats stats = level_set_stats(u, n_levels); // rejects constant fields

    std::vector<LevelSet> contours;
    if (levels.empty()) {
        double lo = u.min(), hi = u.max(), dt = (hi - lo) / n_levels;
        for (int k = 0; k < n_levels; ++k)
            contours.push_back(extract_level_set(u, lo + (k + 0.5) * dt));
    } else {
        for (double t : levels) contours.push_back(extract_level_set(u, t));
    }

    fs::path dir = make_out_dir(cf.out_dir, "levelsets");
    write_contours_csv((dir / "contours.csv").string(), contours);
    write_json((dir / "stats.json").string(), to_json(stats));
    std::vector<std::string> outputs{"contours.csv", "stats.json"};

    if (well_structured) {
        WellStructuredSpec spec;
        spec.points = parse_pairs(points_s);
        spec.directions = parse_pairs(dirs_s);
        spec.offsets = offsets; // empty: defaults to 4h, 8h
        WellStructuredEstimate est = well_structured_estimate(u, spec);
        write_json((dir / "well_structured.json").string(), to_json(est));
        outputs.push_back("well_structured.json");
        std::printf("well-structured: K_hat=%.3e F_sup_hat=%.6f used=%d skipped=%d\n",
                    est.K_hat, est.F_sup_hat, est.used, est.skipped);
    }

    json config{{"u", u_file},
                {"u_expr", u_expr},
                {"n", n},
                {"levels", n_levels},
                {"level", levels},
                {"well_structured", well_structured},
                {"points", points_s},
                {"dirs", dirs_s},
                {"offsets", offsets}};
    write_manifest(dir, "levelsets", config, outputs);
    std::printf("levelsets: L_M_hat=%.6f reach=%.3f components=%d -> %s\n", stats.L_M_hat,
                stats.boundary_reach_fraction, stats.n_components, dir.string().c_str());
    return 0;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const CommonFlags& cf) {
    VerifySuite suite = run_verification();
    for (const auto& c : suite.checks)
        std::printf("[%s] %-28s (%.2fs)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.seconds);

    fs::path dir = make_out_dir(cf.out_dir, "verify");
    write_json((dir / "report.json").string(), to_json(suite));
    write_manifest(dir, "verify", json::object(), {"report.json"});
    std::printf("verify: %s -> %s\n", suite.all_pass ? "all checks passed" : "CHECKS FAILED",
                dir.string().c_str());
    return suite.all_pass ? 0 : EXIT_CHECKS_FAILED;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D conductivity imaging laboratory: forward solves, weighted "
                 "least-gradient reconstruction, level-set geometry, stability sweeps"};
    app.require_subcommand(1);

    CommonFlags cf_forward, cf_lgp, cf_rec, cf_sweep, cf_ls, cf_verify;

    auto* c_fwd = app.add_subcommand("forward", "solve div(sigma grad u) = 0 with Dirichlet data");
    add_common(c_fwd, cf_forward);
    std::string fw_sigma = "1", fw_f = "linear";
    int fw_n = 65, fw_maxit = 0;
    double fw_tol = 1e-10;
    c_fwd->add_option("--sigma", fw_sigma, "conductivity expression in x,y")
        ->capture_default_str();
    c_fwd->add_option("--f", fw_f, "boundary data: linear|tilted[:theta]|layered|expr:<e>")
        ->capture_default_str();
    c_fwd->add_option("--n", fw_n, "nodes per side on the unit square")->capture_default_str();
    c_fwd->add_option("--tol", fw_tol, "relative residual target")->capture_default_str();
    c_fwd->add_option("--max-iter", fw_maxit, "iteration cap (0: from grid size)")
        ->capture_default_str();

    auto* c_lgp = app.add_subcommand("lgp", "solve the weighted least-gradient problem");
    add_common(c_lgp, cf_lgp);
    std::string lg_a, lg_ff, lg_aexpr = "1", lg_f = "linear";
    int lg_n = 65, lg_maxit = 200000;
    double lg_m = 0, lg_M = 0, lg_tolgap = 1e-6;
    c_lgp->add_option("--a", lg_a, "weight field file (grid-text)");
    c_lgp->add_option("--f-file", lg_ff, "boundary trace file (CSV) matching --a");
    c_lgp->add_option("--a-expr", lg_aexpr, "weight expression when no --a file")
        ->capture_default_str();
    c_lgp->add_option("--f", lg_f, "generated boundary data kind")->capture_default_str();
    c_lgp->add_option("--n", lg_n, "nodes per side when generating")->capture_default_str();
    c_lgp->add_option("--m", lg_m, "weight lower band (0: 0.9 min a)")->capture_default_str();
    c_lgp->add_option("--M", lg_M, "weight upper band (0: 1.1 max a)")->capture_default_str();
    c_lgp->add_option("--tol-gap", lg_tolgap, "relative optimality gap target")
        ->capture_default_str();
    c_lgp->add_option("--max-iter", lg_maxit, "primal-dual iteration cap")
        ->capture_default_str();

    auto* c_rec = app.add_subcommand("reconstruct", "recover sigma from current magnitude data");
    add_common(c_rec, cf_rec);
    std::string rc_a, rc_ff, rc_sigma = "1", rc_f = "linear";
    int rc_n = 65, rc_maxit = 200000;
    double rc_tolgap = 1e-6, rc_floor = 1e-6;
    c_rec->add_option("--a", rc_a, "measured |J| file (grid-text); with --f-file");
    c_rec->add_option("--f-file", rc_ff, "boundary trace file (CSV) matching --a");
    c_rec->add_option("--sigma", rc_sigma, "ground-truth expression for a generated run")
        ->capture_default_str();
    c_rec->add_option("--f", rc_f, "generated boundary data kind")->capture_default_str();
    c_rec->add_option("--n", rc_n, "nodes per side when generating")->capture_default_str();
    c_rec->add_option("--tol-gap", rc_tolgap, "relative optimality gap target")
        ->capture_default_str();
    c_rec->add_option("--max-iter", rc_maxit, "primal-dual iteration cap")
        ->capture_default_str();
    c_rec->add_option("--floor", rc_floor, "gradient floor for sigma = a/|grad u|")
        ->capture_default_str();

    auto* c_swp = app.add_subcommand("sweep", "perturbation ladder with inequality checks");
    add_common(c_swp, cf_sweep);
    std::string sw_sigma = "1", sw_eta = "exp(-50*((x-0.5)^2+(y-0.5)^2))", sw_f = "linear";
    int sw_n = 65, sw_fitw = 5;
    std::vector<double> sw_eps;
    double sw_m = 0.05, sw_M = 20, sw_s0 = 0.05, sw_s1 = 20, sw_s2 = 1e9;
    double sw_tol = 1e-10, sw_floor = 1e-8, sw_slack = 0.1, sw_bf = 10;
    c_swp->add_option("--sigma", sw_sigma, "base conductivity expression")
        ->capture_default_str();
    c_swp->add_option("--eta", sw_eta, "direction field expression (max-normalized)")
        ->capture_default_str();
    c_swp->add_option("--f", sw_f, "boundary data kind")->capture_default_str();
    c_swp->add_option("--n", sw_n, "nodes per side")->capture_default_str();
    c_swp->add_option("--epsilons", sw_eps, "ladder values (default 2^-1..2^-8)");
    c_swp->add_option("--m", sw_m, "current magnitude lower bound")->capture_default_str();
    c_swp->add_option("--M", sw_M, "current magnitude upper bound")->capture_default_str();
    c_swp->add_option("--sigma0", sw_s0, "conductivity lower bound")->capture_default_str();
    c_swp->add_option("--sigma1", sw_s1, "conductivity upper bound")->capture_default_str();
    c_swp->add_option("--sigma2", sw_s2, "smoothness proxy bound")->capture_default_str();
    c_swp->add_option("--tol", sw_tol, "forward solver tolerance")->capture_default_str();
    c_swp->add_option("--fit-window", sw_fitw, "smallest epsilons used in fits")
        ->capture_default_str();
    c_swp->add_option("--noise-floor", sw_floor, "solver noise level")->capture_default_str();
    c_swp->add_option("--slope-slack", sw_slack, "require slope >= alpha - slack")
        ->capture_default_str();
    c_swp->add_option("--bounded-factor", sw_bf, "max ratio cap over median")
        ->capture_default_str();

    auto* c_ls = app.add_subcommand("levelsets", "contours, arclength stats, diagnostics");
    add_common(c_ls, cf_ls);
    std::string ls_u, ls_uexpr = "x", ls_points = "0.3,0.5;0.5,0.5;0.7,0.5", ls_dirs = "1,0";
    int ls_n = 129, ls_nlev = 32;
    std::vector<double> ls_levels, ls_offsets;
    bool ls_ws = false;
    c_ls->add_option("--u", ls_u, "field file (grid-text)");
    c_ls->add_option("--u-expr", ls_uexpr, "field expression when no --u file")
        ->capture_default_str();
    c_ls->add_option("--n", ls_n, "nodes per side when generating")->capture_default_str();
    c_ls->add_option("--levels", ls_nlev, "number of midpoint-equispaced levels")
        ->capture_default_str();
    c_ls->add_option("--level", ls_levels, "explicit contour level(s) instead");
    c_ls->add_flag("--well-structured", ls_ws, "run the level-curve difference quotients");
    c_ls->add_option("--points", ls_points, "base points 'x,y;x,y;...'")
        ->capture_default_str();
    c_ls->add_option("--dirs", ls_dirs, "directions 'dx,dy;...'")->capture_default_str();
    c_ls->add_option("--offsets", ls_offsets, "offsets t (default 4h, 8h)");

    auto* c_ver = app.add_subcommand("verify", "run the built-in verification suite");
    add_common(c_ver, cf_verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e); // prints the message or the requested help text
        return rc == 0 ? 0 : EXIT_BAD_INPUT;
    }

    try {
        if (c_fwd->parsed())
            return cmd_forward(cf_forward, c_fwd, fw_sigma, fw_f, fw_n, fw_tol, fw_maxit);
        if (c_lgp->parsed())
            return cmd_lgp(cf_lgp, c_lgp, lg_a, lg_ff, lg_aexpr, lg_f, lg_n, lg_m, lg_M,
                           lg_tolgap, lg_maxit);
        if (c_rec->parsed())
            return cmd_reconstruct(cf_rec, c_rec, rc_a, rc_ff, rc_sigma, rc_f, rc_n, rc_tolgap,
                                   rc_maxit, rc_floor);
        if (c_swp->parsed())
            return cmd_sweep(cf_sweep, c_swp, sw_sigma, sw_eta, sw_f, sw_n, sw_eps, sw_m, sw_M,
                             sw_s0, sw_s1, sw_s2, sw_tol, sw_fitw, sw_floor, sw_slack, sw_bf);
        if (c_ls->parsed())
            return cmd_levelsets(cf_ls, c_ls, ls_u, ls_uexpr, ls_n, ls_nlev, ls_levels, ls_ws,
                                 ls_points, ls_dirs, ls_offsets);
        if (c_ver->parsed()) return cmd_verify(cf_verify);
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return EXIT_BAD_INPUT;
    } catch (const SolveFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return EXIT_CHECKS_FAILED;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return EXIT_INTERNAL;
    }
    return EXIT_INTERNAL;
}
