#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpresp/io.hpp"
#include "qpresp/norms.hpp"

namespace {

using namespace qpresp;

struct CommonArgs {
    std::string config;
    std::string out;
    int threads = 1;
    bool explore = false;
    bool strict = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& c) {
    cmd->add_option("--config", c.config, "INI configuration file")->required();
    cmd->add_option("--out", c.out,
                    "run directory for the JSON report, config echo, and CSV tables "
                    "(default: report to stdout)");
    cmd->add_option("--threads", c.threads, "worker threads for scans")->check(CLI::PositiveNumber);
    cmd->add_flag("--explore", c.explore, "attempt epsilon points outside the domain");
    cmd->add_flag("--strict", c.strict, "restrict scans to the domain (default)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&c](std::uint64_t v) { c.seed = v; c.seed_set = true; },
        "RNG seed override (multistart, pair sampling)");
}

Complex complex_arg(const std::vector<double>& v, Complex fallback) {
    if (v.empty()) return fallback;
    if (v.size() == 1) return Complex(v[0], 0.0);
    return Complex(v[0], v[1]);
}

RunConfig load_with_overrides(const CommonArgs& c) {
    RunConfig cfg = load_config(c.config);
    if (c.explore) cfg.scan.strict = false;
    if (c.strict) cfg.scan.strict = true;
    cfg.scan.threads = c.threads;
    if (c.seed_set) cfg.context.multistart.seed = c.seed;
    return cfg;
}

// Prepares the run directory named by --out and returns it ("" for stdout
// mode).  The input config is echoed alongside the artifacts.
std::string run_dir(const CommonArgs& c) {
    if (c.out.empty()) return {};
    std::filesystem::create_directories(c.out);
    std::error_code ec;
    std::filesystem::copy_file(c.config, std::filesystem::path(c.out) / "config.ini",
                               std::filesystem::copy_options::overwrite_existing, ec);
    if (ec) throw ConfigError("cannot echo the config into " + c.out + ": " + ec.message());
    return c.out;
}

std::string artifact_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void emit(const std::string& dir, const Json& j) {
    if (dir.empty())
        std::cout << j.dump(2) << std::endl;
    else
        write_json_file(artifact_path(dir, "report.json"), j);
}

void write_scan_csv(const std::string& path, const std::vector<ScanPoint>& points) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.precision(17);
    out << "re,im,in_domain,attempted,status,iterations,contraction,residual_raw,"
           "residual_scaled,solution_norm,min_abs_multiplier,resonance_distance,error\n";
    for (const auto& p : points) {
        out << p.eps.real() << ',' << p.eps.imag() << ',' << (p.in_domain ? 1 : 0) << ','
            << (p.attempted ? 1 : 0) << ',' << (p.attempted ? to_string(p.status) : "") << ','
            << p.iterations << ',' << p.contraction << ',' << p.residual_raw << ','
            << p.residual_scaled << ',' << p.solution_norm << ',' << p.min_abs_multiplier << ','
            << p.resonance_distance << ',' << p.error << '\n';
    }
}

void write_resonance_csv(const std::string& path, const ResonanceTable& table, int d) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.precision(17);
    out << "re,im";
    for (int j = 0; j < d; ++j) out << ",k_" << j;
    out << ",n\n";
    for (const auto& r : table.found) {
        out << r.eps.real() << ',' << r.eps.imag();
        for (int j = 0; j < d; ++j) out << ',' << r.k[j];
        out << ',' << r.n << '\n';
    }
}

// Largest circle radius around `center` whose samples stay inside the
// continued (union) domain; 0 when even tiny circles leave it.
double safe_circle_radius(const DomainSpec& domain, Complex center, int samples) {
    const auto fits = [&](double r) {
        for (int j = 0; j < samples; ++j) {
            const double phi = kTwoPi * j / samples;
            if (!domain.contains_union(center + r * Complex(std::cos(phi), std::sin(phi))))
                return false;
        }
        return true;
    };
    double lo = 0.0, hi = std::abs(center);
    if (hi == 0.0 || !fits(hi * 1e-6)) return 0.0;
    lo = hi * 1e-6;
    while (fits(hi) && hi < 1e6) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fits(mid) ? lo : hi) = mid;
    }
    return lo;
}

int run_solve(const CommonArgs& c, const std::vector<double>& eps_arg,
              const std::string& series_path, bool start_series, const std::string& csv_path) {
    RunConfig cfg = load_with_overrides(c);
    const std::string dir = run_dir(c);
    const Complex eps = complex_arg(eps_arg, cfg.solve_eps);
    const ModelContext ctx = build_context(cfg.model, cfg.context);
    SpectralField start = zero_start(ctx);
    Json start_info = "zero";
    if (start_series || cfg.solve_start_series) {
        LindstedtSeries series = series_path.empty()
                                     ? expand_response(ctx, cfg.lindstedt)
                                     : load_series(series_path, ctx);
        start = series.evaluate(eps, cfg.solve_start_order);
        start_info = Json{{"series_order", series.order()},
                          {"partial_order", cfg.solve_start_order}};
    }
    const FixedPointResult r = solve_response(ctx, eps, start, cfg.fixed_point);
    Json payload{{"model", context_summary(ctx)},
                 {"eps", complex_to_json(eps)},
                 {"start", start_info},
                 {"fixed_point", to_json(r)},
                 {"in_domain", cfg.domain.contains(eps)},
                 {"domain", cfg.domain.describe()}};
    if (r.status == FixedPointStatus::Converged) {
        payload["residual"] = to_json(response_residual(ctx, eps, r.u, &cfg.norm));
        payload["solution_norm"] = norm(r.u, cfg.norm);
        std::string csv = csv_path;
        if (csv.empty() && !dir.empty()) csv = artifact_path(dir, "solution.csv");
        if (!csv.empty()) {
            write_field_csv(csv, r.u);
            payload["csv"] = csv;
        }
    }
    emit(dir, report("solve", payload));
    return r.status == FixedPointStatus::Converged ? 0 : 4;
}

int run_lindstedt(const CommonArgs& c, int order_arg, const std::string& save_path, bool fit) {
    RunConfig cfg = load_with_overrides(c);
    const std::string dir = run_dir(c);
    if (order_arg > 0) cfg.lindstedt.order = order_arg;
    const ModelContext ctx = build_context(cfg.model, cfg.context);
    const LindstedtSeries series = expand_response(ctx, cfg.lindstedt);
    std::vector<double> term_sups;
    for (const auto& t : series.terms) term_sups.push_back(t.max_abs_coeff());
    // Strip-loss bookkeeping: weighted norms of each term at the configured
    // rho and at two narrower strips.
    Json term_norms = Json::object();
    for (const double rho : {cfg.norm.rho, 0.5 * cfg.norm.rho, 0.25 * cfg.norm.rho}) {
        NormParams np = cfg.norm;
        np.rho = rho;
        std::vector<double> norms;
        norms.reserve(series.terms.size());
        for (const auto& t : series.terms) norms.push_back(norm(t, np));
        char key[32];
        std::snprintf(key, sizeof key, "rho=%g", rho);
        term_norms[key] = std::move(norms);
    }
    Json payload{{"model", context_summary(ctx)},
                 {"order", series.order()},
                 {"order_residuals", series.order_residuals},
                 {"term_sups", term_sups},
                 {"term_norms", std::move(term_norms)},
                 {"nonresonance",
                  to_json(nonresonance_order(cfg.model.omega, cfg.nonresonance_k_max,
                                             cfg.norm.rho))}};
    if (!save_path.empty()) {
        save_series(save_path, series);
        payload["saved"] = save_path;
    } else if (!dir.empty()) {
        const std::string path = artifact_path(dir, "series.json");
        save_series(path, series);
        payload["saved"] = path;
    }
    if (fit) payload["fit"] = to_json(fit_residual_order(ctx, series, cfg.scan_grid));
    emit(dir, report("lindstedt", payload));
    return 0;
}

int run_scan(const CommonArgs& c) {
    RunConfig cfg = load_with_overrides(c);
    const std::string dir = run_dir(c);
    const ModelContext ctx = build_context(cfg.model, cfg.context);
    LindstedtSeries series;
    const LindstedtSeries* series_ptr = nullptr;
    if (cfg.scan.use_series_start) {
        series = expand_response(ctx, cfg.lindstedt);
        series_ptr = &series;
    }
    const auto points = scan_epsilon(ctx, cfg.scan_grid, cfg.domain, series_ptr, cfg.scan);
    int converged = 0, attempted = 0;
    for (const auto& p : points) {
        attempted += p.attempted ? 1 : 0;
        converged += (p.attempted && p.status == FixedPointStatus::Converged) ? 1 : 0;
    }
    Json payload{{"model", context_summary(ctx)},
                 {"domain", cfg.domain.describe()},
                 {"strict", cfg.scan.strict},
                 {"points", to_json(points)},
                 {"attempted", attempted},
                 {"converged", converged}};
    if (!dir.empty()) {
        const std::string path = artifact_path(dir, "scan.csv");
        write_scan_csv(path, points);
        payload["csv"] = path;
    }
    emit(dir, report("scan", payload));
    return 0;
}

int run_resonances(const CommonArgs& c) {
    RunConfig cfg = load_with_overrides(c);
    const std::string dir = run_dir(c);
    const ModelContext ctx = build_context(cfg.model, cfg.context);
    const ResonanceTable table =
        resonance_locations(ctx.op, cfg.resonance_k_max, cfg.resonance_n_max);
    Json payload{{"model", context_summary(ctx)},
                 {"k_max", cfg.resonance_k_max},
                 {"n_max", cfg.resonance_n_max},
                 {"resonances", to_json(table)},
                 {"nearest_to_solve_eps",
                  nearest_resonance_distance(table, cfg.solve_eps)},
                 {"solve_eps", complex_to_json(cfg.solve_eps)}};
    if (!dir.empty()) {
        const std::string path = artifact_path(dir, "resonances.csv");
        write_resonance_csv(path, table, ctx.spec.omega.dim());
        payload["csv"] = path;
    }
    emit(dir, report("resonances", payload));
    return 0;
}

int run_gamma(const CommonArgs& c, const std::vector<double>& eps_arg, double ball,
              int n_pairs) {
    RunConfig cfg = load_with_overrides(c);
    const std::string dir = run_dir(c);
    const Complex eps = complex_arg(eps_arg, cfg.gamma_eps);
    const ModelContext ctx = build_context(cfg.model, cfg.context);
    const GammaBound g = gamma_lower_bound(ctx.op, eps, cfg.gamma_grid_samples);
    const ContractionEstimate est =
        contraction_estimate(ctx.op, eps, cfg.model.h, ctx.c0, ball);
    Json payload{{"model", context_summary(ctx)},
                 {"eps", complex_to_json(eps)},
                 {"gamma", to_json(g)},
                 {"contraction", to_json(est)}};
    if (n_pairs > 0) {
        const std::uint64_t seed = c.seed_set ? c.seed : cfg.context.multistart.seed;
        payload["pair_lipschitz"] =
            contraction_pairs(ctx.op, eps, ctx.forcing, cfg.model.h, ctx.c0, zero_start(ctx),
                              ball, n_pairs, seed, cfg.norm);
        payload["pair_count"] = n_pairs;
    }
    emit(dir, report("gamma", payload));
    return 0;
}

int run_cauchy(const CommonArgs& c) {
    RunConfig cfg = load_with_overrides(c);
    const std::string dir = run_dir(c);
    const ModelContext ctx = build_context(cfg.model, cfg.context);
    double radius = cfg.cauchy_radius;
    if (radius <= 0.0) {
        radius = 0.8 * safe_circle_radius(cfg.domain, cfg.cauchy_center, cfg.cauchy_samples);
        if (radius <= 0.0)
            throw ConfigError("no circle around the requested center fits the domain; "
                              "set [cauchy] radius explicitly");
    }
    const CauchyCheck check = cauchy_check(ctx, cfg.cauchy_center, radius, cfg.cauchy_samples,
                                           cfg.domain, nullptr, cfg.fixed_point);
    Json payload{{"model", context_summary(ctx)},
                 {"domain", cfg.domain.describe()},
                 {"check", to_json(check)}};
    emit(dir, report("cauchy", payload));
    return check.failures == 0 ? 0 : 4;
}

int run_omega_diag(const CommonArgs& c) {
    RunConfig cfg = load_with_overrides(c);
    const std::string dir = run_dir(c);
    const Frequency& omega = cfg.model.omega;
    const auto scan = omega.scan_divisors(cfg.nonresonance_k_max);
    Json omega_json = Json::array();
    for (Eigen::Index i = 0; i < omega.values().size(); ++i)
        omega_json.push_back(omega.values()[i]);
    Json k_json = Json::array();
    for (Eigen::Index i = 0; i < scan.k.size(); ++i) k_json.push_back(scan.k[i]);
    Json payload{{"omega", std::move(omega_json)},
                 {"k_max", cfg.nonresonance_k_max},
                 {"min_divisor", scan.min_abs},
                 {"min_divisor_k", std::move(k_json)},
                 {"nonresonance",
                  to_json(nonresonance_order(omega, cfg.nonresonance_k_max, cfg.norm.rho))},
                 {"rho", cfg.norm.rho}};
    emit(dir, report("omega-diag", payload));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral solver for quasi-periodic response solutions of "
                 "strongly damped nonlinear wave models"};
    app.require_subcommand(1);

    CommonArgs common;
    std::vector<double> eps_arg;
    std::string series_path, csv_path, save_path;
    bool start_series = false, fit = false;
    int order_arg = 0;
    double ball = 1.0;
    int n_pairs = 16;

    CLI::App* solve = app.add_subcommand("solve", "run the fixed-point solver at one epsilon");
    add_common(solve, common);
    solve->add_option("--eps", eps_arg, "epsilon override: re [im]")->expected(1, 2);
    solve->add_option("--series", series_path, "expansion file to start from");
    solve->add_flag("--from-series", start_series, "start from the expansion partial sum");
    solve->add_option("--csv", csv_path, "dump the solution coefficients to CSV");

    CLI::App* lind = app.add_subcommand("lindstedt", "compute the response expansion");
    add_common(lind, common);
    lind->add_option("--order", order_arg, "expansion order override")->check(CLI::PositiveNumber);
    lind->add_option("--save", save_path, "save the expansion to this file");
    lind->add_flag("--fit", fit, "fit the truncated-series residual order on the scan grid");

    CLI::App* scan = app.add_subcommand("scan", "fixed-point scan over the epsilon grid");
    add_common(scan, common);

    CLI::App* reson = app.add_subcommand("resonances", "multiplier-zero locations");
    add_common(reson, common);

    CLI::App* gamma = app.add_subcommand("gamma", "spectral lower bound and contraction estimate");
    add_common(gamma, common);
    gamma->add_option("--eps", eps_arg, "epsilon override: re [im]")->expected(1, 2);
    gamma->add_option("--ball", ball, "coefficient ball radius for the Lipschitz bound");
    gamma->add_option("--pairs", n_pairs, "sampled pairs for the empirical Lipschitz constant "
                                          "(0 disables)");

    CLI::App* cauchy = app.add_subcommand("cauchy", "circle-mean analyticity probe");
    add_common(cauchy, common);

    CLI::App* odiag = app.add_subcommand("omega-diag", "small-divisor diagnostics for omega");
    add_common(odiag, common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(solve))
            return run_solve(common, eps_arg, series_path, start_series, csv_path);
        if (app.got_subcommand(lind)) return run_lindstedt(common, order_arg, save_path, fit);
        if (app.got_subcommand(scan)) return run_scan(common);
        if (app.got_subcommand(reson)) return run_resonances(common);
        if (app.got_subcommand(gamma)) return run_gamma(common, eps_arg, ball, n_pairs);
        if (app.got_subcommand(cauchy)) return run_cauchy(common);
        if (app.got_subcommand(odiag)) return run_omega_diag(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
