#include "qpresp/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace qpresp {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

double parse_double(const std::string& where, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& where, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& where, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

Complex parse_complex(const std::string& where, const std::string& v) {
    const auto t = tokens(v);
    if (t.size() == 1) return Complex(parse_double(where, t[0]), 0.0);
    if (t.size() == 2)
        return Complex(parse_double(where, t[0]), parse_double(where, t[1]));
    throw ConfigError(where + ": expected 're' or 're im'");
}

std::vector<double> parse_doubles(const std::string& where, const std::string& v) {
    std::vector<double> out;
    for (const auto& t : tokens(v)) out.push_back(parse_double(where, t));
    if (out.empty()) throw ConfigError(where + ": expected at least one number");
    return out;
}

Variant parse_variant(const std::string& where, const std::string& v) {
    if (v == "A") return Variant::A;
    if (v == "A'" || v == "Aprime") return Variant::APrime;
    if (v == "B") return Variant::B;
    if (v == "B'" || v == "Bprime") return Variant::BPrime;
    throw ConfigError(where + ": expected A, A', B or B', got '" + v + "'");
}

BoundaryCondition parse_bc(const std::string& where, const std::string& v) {
    if (v == "dirichlet") return BoundaryCondition::Dirichlet;
    if (v == "neumann") return BoundaryCondition::Neumann;
    if (v == "periodic") return BoundaryCondition::Periodic;
    throw ConfigError(where + ": expected dirichlet, neumann or periodic, got '" + v + "'");
}

Nonlinearity parse_h(const std::string& where, const std::string& v) {
    const auto t = tokens(v);
    if (t.empty()) throw ConfigError(where + ": empty nonlinearity");
    if (t[0] == "poly") {
        std::vector<double> coeffs;
        for (std::size_t i = 1; i < t.size(); ++i)
            coeffs.push_back(parse_double(where, t[i]));
        if (coeffs.empty()) throw ConfigError(where + ": poly needs coefficients");
        return Nonlinearity::polynomial(coeffs);
    }
    if (t[0] == "mems") {
        if (t.size() < 2 || t.size() > 3)
            throw ConfigError(where + ": mems needs 'mems gamma [pole_guard]'");
        const double gamma = parse_double(where, t[1]);
        const double guard = t.size() == 3 ? parse_double(where, t[2]) : 1e-6;
        return Nonlinearity::mems(gamma, guard);
    }
    throw ConfigError(where + ": expected 'poly ...' or 'mems ...', got '" + t[0] + "'");
}

ForcingEntry parse_forcing(const std::string& where, const std::string& v, int d) {
    const auto t = tokens(v);
    const std::size_t base = 1 + static_cast<std::size_t>(d) + 1;  // kind + k + n
    if (t.empty()) throw ConfigError(where + ": empty forcing entry");
    ForcingEntry e;
    e.k = VecI(d);
    const auto need = [&](std::size_t count) {
        if (t.size() != count)
            throw ConfigError(where + ": forcing '" + t[0] + "' needs " +
                              std::to_string(count - 1) + " numbers for d = " +
                              std::to_string(d));
    };
    if (t[0] == "cos" || t[0] == "sin") {
        need(base + 1);
    } else if (t[0] == "mode") {
        need(base + 2);
    } else {
        throw ConfigError(where + ": expected cos, sin or mode, got '" + t[0] + "'");
    }
    for (int i = 0; i < d; ++i) e.k[i] = parse_int(where, t[1 + i]);
    e.n = parse_int(where, t[1 + d]);
    if (t[0] == "cos") {
        e.value = Complex(0.5 * parse_double(where, t[2 + d]), 0.0);
    } else if (t[0] == "sin") {
        e.value = Complex(0.0, -0.5 * parse_double(where, t[2 + d]));
    } else {
        e.value = Complex(parse_double(where, t[2 + d]), parse_double(where, t[3 + d]));
    }
    return e;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::vector<double> omega_vals{1.0};
    bool omega_check = true;
    bool omega_seen = false;
    bool domain_kind_set = false;
    std::string h_line;
    std::vector<std::string> forcing_lines;
    struct ScanGrid {
        std::string kind = "real";
        double lo = 0.05, hi = 0.09;
        Complex box_lo{0.0, 0.0}, box_hi{0.1, 0.1};
        int count = 9, nx = 8, ny = 8;
    } grid;

    std::map<std::string, int> seen;
    std::string section;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::size_t hash = raw.find_first_of("#;");
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string where = "[" + section + "] " + key;
        if (key != "forcing" && ++seen[section + "." + key] > 1)
            throw ConfigError(where + ": duplicate key");

        if (section == "model") {
            if (key == "variant") cfg.model.variant = parse_variant(where, value);
            else if (key == "bc") cfg.model.trunc.bc = parse_bc(where, value);
            else if (key == "omega") { omega_vals = parse_doubles(where, value); omega_seen = true; }
            else if (key == "omega_check") omega_check = parse_bool(where, value);
            else if (key == "h") h_line = value;
            else if (key == "forcing") forcing_lines.push_back(value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "truncation") {
            if (key == "k_theta") cfg.model.trunc.k_theta = parse_int(where, value);
            else if (key == "n_x") cfg.model.trunc.n_x = parse_int(where, value);
            else if (key == "oversample") cfg.model.trunc.oversample = parse_int(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "norm") {
            if (key == "rho") cfg.norm.rho = parse_double(where, value);
            else if (key == "j") cfg.norm.j = parse_int(where, value);
            else if (key == "m") cfg.norm.m = parse_int(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "domain") {
            if (key == "kind") {
                domain_kind_set = true;
                if (value == "parabolic") cfg.domain.kind = DomainSpec::Kind::Parabolic;
                else if (value == "sector") cfg.domain.kind = DomainSpec::Kind::Sector;
                else throw ConfigError(where + ": expected parabolic or sector");
            } else if (key == "sigma") cfg.domain.sigma = parse_double(where, value);
            else if (key == "b") cfg.domain.b = parse_double(where, value);
            else if (key == "delta") cfg.domain.delta = parse_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "fixedpoint") {
            if (key == "max_iterations") cfg.fixed_point.max_iterations = parse_int(where, value);
            else if (key == "tolerance") cfg.fixed_point.tolerance = parse_double(where, value);
            else if (key == "ball_radius") cfg.fixed_point.ball_radius = parse_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "lindstedt") {
            if (key == "order") cfg.lindstedt.order = parse_int(where, value);
            else if (key == "divisor_floor") cfg.lindstedt.divisor_floor = parse_double(where, value);
            else if (key == "potential_max_iterations")
                cfg.lindstedt.potential_max_iterations = parse_int(where, value);
            else if (key == "potential_tolerance")
                cfg.lindstedt.potential_tolerance = parse_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "zeroth") {
            if (key == "branch") cfg.context.branch = parse_int(where, value);
            else if (key == "multistart") cfg.context.run_multistart = parse_bool(where, value);
            else if (key == "random_starts")
                cfg.context.multistart.random_starts = parse_int(where, value);
            else if (key == "seed")
                cfg.context.multistart.seed = static_cast<std::uint64_t>(parse_int(where, value));
            else if (key == "constants")
                cfg.context.multistart.constant_starts = parse_doubles(where, value);
            else if (key == "newton_max_iterations")
                cfg.context.multistart.newton.max_iterations = parse_int(where, value);
            else if (key == "newton_tolerance")
                cfg.context.multistart.newton.tolerance = parse_double(where, value);
            else if (key == "b_max_iterations")
                cfg.context.zeroth_b.max_iterations = parse_int(where, value);
            else if (key == "b_tolerance")
                cfg.context.zeroth_b.tolerance = parse_double(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "solve") {
            if (key == "eps") cfg.solve_eps = parse_complex(where, value);
            else if (key == "start") {
                if (value == "zero") cfg.solve_start_series = false;
                else if (value == "series") cfg.solve_start_series = true;
                else throw ConfigError(where + ": expected zero or series");
            } else if (key == "start_order") cfg.solve_start_order = parse_int(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "scan") {
            if (key == "kind") {
                if (value != "real" && value != "box")
                    throw ConfigError(where + ": expected real or box");
                grid.kind = value;
            } else if (key == "lo") grid.lo = parse_double(where, value);
            else if (key == "hi") grid.hi = parse_double(where, value);
            else if (key == "count") grid.count = parse_int(where, value);
            else if (key == "corner_lo") grid.box_lo = parse_complex(where, value);
            else if (key == "corner_hi") grid.box_hi = parse_complex(where, value);
            else if (key == "nx") grid.nx = parse_int(where, value);
            else if (key == "ny") grid.ny = parse_int(where, value);
            else if (key == "strict") cfg.scan.strict = parse_bool(where, value);
            else if (key == "series_start") cfg.scan.use_series_start = parse_bool(where, value);
            else if (key == "start_order") cfg.scan.start_order = parse_int(where, value);
            else if (key == "resonance_k_max") cfg.scan.resonance_k_max = parse_int(where, value);
            else if (key == "resonance_n_max") cfg.scan.resonance_n_max = parse_int(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "resonances") {
            if (key == "k_max") cfg.resonance_k_max = parse_int(where, value);
            else if (key == "n_max") cfg.resonance_n_max = parse_int(where, value);
            else if (key == "nonresonance_k_max") cfg.nonresonance_k_max = parse_int(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "gamma") {
            if (key == "eps") cfg.gamma_eps = parse_complex(where, value);
            else if (key == "grid_samples") cfg.gamma_grid_samples = parse_int(where, value);
            else throw ConfigError(where + ": unknown key");
        } else if (section == "cauchy") {
            if (key == "center") cfg.cauchy_center = parse_complex(where, value);
            else if (key == "radius") cfg.cauchy_radius = parse_double(where, value);
            else if (key == "samples") cfg.cauchy_samples = parse_int(where, value);
            else throw ConfigError(where + ": unknown key");
        } else {
            throw ConfigError("unknown section [" + section + "]");
        }
    }

    if (omega_seen) {
        VecR w(static_cast<Eigen::Index>(omega_vals.size()));
        for (std::size_t i = 0; i < omega_vals.size(); ++i) w[static_cast<Eigen::Index>(i)] = omega_vals[i];
        cfg.model.omega = omega_check ? Frequency::checked(w) : Frequency::unchecked(w);
    } else if (omega_check) {
        cfg.model.omega = Frequency::checked(cfg.model.omega.values());
    }
    if (!h_line.empty()) cfg.model.h = parse_h("[model] h", h_line);
    const int d = cfg.model.omega.dim();
    for (const auto& fl : forcing_lines)
        cfg.model.forcing.push_back(parse_forcing("[model] forcing", fl, d));
    if (!domain_kind_set)
        cfg.domain.kind = (cfg.model.variant == Variant::A || cfg.model.variant == Variant::APrime)
                              ? DomainSpec::Kind::Parabolic
                              : DomainSpec::Kind::Sector;
    if (grid.kind == "real")
        cfg.scan_grid = epsilon_grid_real(grid.lo, grid.hi, grid.count);
    else
        cfg.scan_grid = epsilon_grid_box(grid.box_lo, grid.box_hi, grid.nx, grid.ny);
    cfg.scan.norm = cfg.norm;
    cfg.scan.fixed_point = cfg.fixed_point;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace qpresp
