#include "qpresp/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace qpresp {

namespace {

constexpr int kSchemaVersion = 1;

Json vec_to_json(const VecI& k) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < k.size(); ++i) a.push_back(k[i]);
    return a;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open output file: " + path);
    return os;
}

}  // namespace

void write_field_csv(std::ostream& os, const SpectralField& u) {
    const auto& d = *u.disc();
    for (int i = 0; i < d.d(); ++i) os << "k_" << i << ",";
    os << "n,re,im\n";
    os << std::setprecision(17);
    for (int r = 0; r < d.n_theta_modes(); ++r) {
        const VecI k = d.k_of(r);
        for (int n = 0; n < d.n_x(); ++n) {
            for (Eigen::Index i = 0; i < k.size(); ++i) os << k[i] << ",";
            const Complex z = u.coeffs()(r, n);
            os << (n + 1) << "," << z.real() << "," << z.imag() << "\n";
        }
    }
}

void write_field_csv(const std::string& path, const SpectralField& u) {
    auto os = open_out(path);
    write_field_csv(os, u);
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json field_to_json(const SpectralField& u) {
    const auto& d = *u.disc();
    Json rows = Json::array();
    for (int r = 0; r < d.n_theta_modes(); ++r) {
        Json row = Json::array();
        for (int n = 0; n < d.n_x(); ++n) {
            const Complex z = u.coeffs()(r, n);
            row.push_back(Json::array({z.real(), z.imag()}));
        }
        rows.push_back(std::move(row));
    }
    return Json{{"basis", u.basis_tag() == SourceTag::MinusDelta ? "minus_delta" : "L"},
                {"theta_modes", d.n_theta_modes()},
                {"n_x", d.n_x()},
                {"coeffs", std::move(rows)}};
}

Json to_json(const HullResidual& r) {
    Json j{{"raw_sup", r.raw_sup},
           {"scaled_sup", r.scaled_sup},
           {"forcing_sup", r.forcing_sup},
           {"relative", r.relative}};
    if (r.norm_raw >= 0.0) {
        j["norm_raw"] = r.norm_raw;
        j["norm_scaled"] = r.norm_scaled;
    }
    return j;
}

Json to_json(const FixedPointResult& r) {
    return Json{{"status", to_string(r.status)},
                {"iterations", r.iterations},
                {"contraction", r.contraction},
                {"min_abs_multiplier", r.min_abs_multiplier},
                {"step_norms", r.step_norms}};
}

Json to_json(const GammaBound& g) {
    return Json{{"value", g.value}, {"tau", g.tau}, {"n", g.n}};
}

Json to_json(const ResonanceTable& t) {
    Json found = Json::array();
    for (const auto& r : t.found)
        found.push_back(Json{{"eps", complex_to_json(r.eps)},
                             {"k", vec_to_json(r.k)},
                             {"n", r.n}});
    Json skipped = Json::array();
    for (const auto& s : t.skipped)
        skipped.push_back(Json{{"k", vec_to_json(s.first)}, {"n", s.second}});
    return Json{{"found", std::move(found)}, {"skipped", std::move(skipped)}};
}

Json to_json(const NonresonanceDiagnostic& d) {
    Json j{{"sup", d.sup}, {"unbounded", d.unbounded}};
    if (d.unbounded)
        j["max_order"] = "unbounded";
    else
        j["max_order"] = d.max_order;
    if (d.k.size() != 0) j["k"] = vec_to_json(d.k);
    return j;
}

Json to_json(const ScanPoint& p) {
    Json j{{"eps", complex_to_json(p.eps)},
           {"in_domain", p.in_domain},
           {"attempted", p.attempted}};
    if (p.attempted) {
        j["status"] = to_string(p.status);
        j["iterations"] = p.iterations;
        j["contraction"] = p.contraction;
        j["residual_raw"] = p.residual_raw;
        j["residual_scaled"] = p.residual_scaled;
        j["solution_norm"] = p.solution_norm;
        j["min_abs_multiplier"] = p.min_abs_multiplier;
    }
    if (p.resonance_distance >= 0.0) j["resonance_distance"] = p.resonance_distance;
    if (!p.error.empty()) j["error"] = p.error;
    return j;
}

Json to_json(const std::vector<ScanPoint>& pts) {
    Json a = Json::array();
    for (const auto& p : pts) a.push_back(to_json(p));
    return a;
}

Json to_json(const CauchyCheck& c) {
    return Json{{"center", complex_to_json(c.center)},
                {"radius", c.radius},
                {"samples", c.samples},
                {"domain_ok", c.domain_ok},
                {"failures", c.failures},
                {"center_defect", c.center_defect},
                {"coeff_sups", c.coeff_sups}};
}

Json to_json(const ResidualOrderFit& f) {
    return Json{{"eps_abs", f.eps_abs},
                {"residuals", f.residuals},
                {"slope", f.slope},
                {"intercept", f.intercept},
                {"r_squared", f.r_squared},
                {"expected", f.expected},
                {"skipped_underflow", f.skipped_underflow},
                {"floor", f.floor}};
}

Json to_json(const ContractionEstimate& c) {
    return Json{{"gamma_value", c.gamma_value},
                {"inverse_bound", c.inverse_bound},
                {"grid_inverse", c.grid_inverse},
                {"lipschitz", c.lipschitz},
                {"contraction", c.contraction},
                {"ball_radius", c.ball_radius}};
}

Json to_json(const ZerothBranch& b) {
    return Json{{"lambda1", b.lambda1},
                {"h2_ok", b.h2_ok},
                {"newton_iterations", b.profile.iterations},
                {"newton_residual", b.profile.residual},
                {"profile_norm", b.profile.c0.norm()}};
}

Json context_summary(const ModelContext& ctx) {
    Json j{{"variant", to_string(ctx.spec.variant)},
           {"bc", to_string(ctx.spec.trunc.bc)},
           {"k_theta", ctx.spec.trunc.k_theta},
           {"n_x", ctx.spec.trunc.n_x},
           {"d", ctx.spec.omega.dim()},
           {"h", ctx.spec.h.describe()},
           {"model_hash", ctx.spec.hash()}};
    Json omega = Json::array();
    for (Eigen::Index i = 0; i < ctx.spec.omega.values().size(); ++i)
        omega.push_back(ctx.spec.omega.values()[i]);
    j["omega"] = std::move(omega);
    if (!ctx.branches.empty()) {
        Json branches = Json::array();
        for (const auto& b : ctx.branches) branches.push_back(to_json(b));
        j["zeroth_branches"] = std::move(branches);
        j["lambda1"] = ctx.L->lambda[0];
    }
    if (ctx.spec.variant == Variant::B) {
        j["zeroth_iterations"] = ctx.u0_report.iterations;
        j["zeroth_last_step"] = ctx.u0_report.last_step;
    }
    return j;
}

Json report(const std::string& kind, Json payload) {
    return Json{{"schema_version", kSchemaVersion}, {"kind", kind},
                {"payload", std::move(payload)}};
}

void write_json_file(const std::string& path, const Json& j) {
    auto os = open_out(path);
    os << j.dump(2) << "\n";
}

Json series_to_json(const LindstedtSeries& s) {
    Json terms = Json::array();
    for (const auto& t : s.terms) terms.push_back(field_to_json(t)["coeffs"]);
    Json c0 = Json::array();
    for (Eigen::Index i = 0; i < s.c0.size(); ++i) c0.push_back(s.c0[i]);
    return Json{{"schema_version", kSchemaVersion},
                {"kind", "expansion"},
                {"variant", to_string(s.variant)},
                {"model_hash", s.model_hash},
                {"order", s.order()},
                {"c0", std::move(c0)},
                {"order_residuals", s.order_residuals},
                {"terms", std::move(terms)}};
}

LindstedtSeries series_from_json(const Json& j, const ModelContext& ctx) {
    if (!j.is_object() || j.value("kind", "") != "expansion")
        throw Error("not an expansion file");
    if (j.value("schema_version", 0) != kSchemaVersion)
        throw Error("unsupported expansion schema version");
    if (j.value("model_hash", std::uint64_t(0)) != ctx.spec.hash())
        throw Error("expansion was computed for a different model");
    if (j.value("variant", "") != std::string(to_string(ctx.spec.variant)))
        throw Error("expansion variant mismatch");
    LindstedtSeries s;
    s.variant = ctx.spec.variant;
    s.model_hash = ctx.spec.hash();
    const auto& c0j = j.at("c0");
    s.c0 = VecR(c0j.size());
    for (std::size_t i = 0; i < c0j.size(); ++i) s.c0[static_cast<Eigen::Index>(i)] = c0j[i].get<double>();
    s.order_residuals = j.at("order_residuals").get<std::vector<double>>();
    const auto& terms = j.at("terms");
    const int T = ctx.disc->n_theta_modes();
    const int N = ctx.disc->n_x();
    for (const auto& tj : terms) {
        if (static_cast<int>(tj.size()) != T) throw Error("expansion term has the wrong shape");
        SpectralField f = SpectralField::zero(ctx.basis);
        for (int r = 0; r < T; ++r) {
            const auto& row = tj[r];
            if (static_cast<int>(row.size()) != N)
                throw Error("expansion term has the wrong shape");
            for (int n = 0; n < N; ++n)
                f.coeffs()(r, n) = Complex(row[n][0].get<double>(), row[n][1].get<double>());
        }
        s.terms.push_back(std::move(f));
    }
    if (s.terms.empty()) throw Error("expansion file has no terms");
    return s;
}

void save_series(const std::string& path, const LindstedtSeries& s) {
    write_json_file(path, series_to_json(s));
}

LindstedtSeries load_series(const std::string& path, const ModelContext& ctx) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open expansion file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(std::string("malformed expansion file: ") + e.what());
    }
    return series_from_json(j, ctx);
}

}  // namespace qpresp
