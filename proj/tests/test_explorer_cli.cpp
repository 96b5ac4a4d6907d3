// Domain scans, residual-order fits, the circle-mean analyticity probe and
// the strict INI configuration parser.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <qpresp/config.hpp>
#include <qpresp/explorer.hpp>

#include "support/bridge.hpp"

using namespace qpresp;

namespace {

const Complex kNeumannResonance{0.0, 0.16329115640316914};

NormParams np_d1() {
    NormParams np;
    np.rho = 0.05;
    np.j = 2;
    np.m = 2;
    return np;
}

ScanOptions scan_opts(bool strict, int threads) {
    ScanOptions o;
    o.strict = strict;
    o.threads = threads;
    o.norm = np_d1();
    return o;
}

}  // namespace

TEST_CASE("epsilon grids: inclusive endpoints and row-major boxes") {
    const auto line = epsilon_grid_real(0.05, 0.09, 5);
    REQUIRE(line.size() == 5);
    CHECK(line.front() == Complex(0.05, 0.0));
    CHECK(line.back() == Complex(0.09, 0.0));
    CHECK(line[2].real() == doctest::Approx(0.07).epsilon(1e-15));

    const auto single = epsilon_grid_real(0.03, 0.09, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == Complex(0.03, 0.0));

    const auto box = epsilon_grid_box(Complex(0.0, 0.0), Complex(0.1, 0.2), 3, 2);
    REQUIRE(box.size() == 6);
    CHECK(box.front() == Complex(0.0, 0.0));
    CHECK(box.back() == Complex(0.1, 0.2));
    CHECK(box[1] == Complex(0.05, 0.0));
    CHECK(box[3] == Complex(0.0, 0.2));

    CHECK_THROWS_AS(epsilon_grid_real(0.0, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(epsilon_grid_box(Complex(0, 0), Complex(1, 1), 0, 3), ConfigError);
}

TEST_CASE("exploration scan: failures cluster at the resonance, the rest converges") {
    ModelSpec spec = bridge::benchmark_A_neumann(6, 6);
    spec.forcing[0].value = Complex(2.0, 0.0);
    const ModelContext ctx = build_context(spec);
    const DomainSpec domain;  // parabolic; the imaginary axis lies outside it

    std::vector<Complex> grid;
    for (double t = 0.14; t < 0.1901; t += 0.0025) grid.emplace_back(0.0, t);

    ScanOptions opts = scan_opts(/*strict=*/false, /*threads=*/2);
    opts.resonance_k_max = 4;
    const auto points = scan_epsilon(ctx, grid, domain, nullptr, opts);
    REQUIRE(points.size() == grid.size());

    int failures = 0, converged = 0;
    for (const auto& p : points) {
        CHECK_FALSE(p.in_domain);
        CHECK(p.attempted);  // exploration mode attempts everything
        CHECK(p.resonance_distance >= 0.0);
        if (p.status == FixedPointStatus::Converged) {
            ++converged;
            CHECK(p.error.empty());
            CHECK(p.residual_scaled < 1e-9);
            CHECK(p.solution_norm > 0.0);
            CHECK(p.min_abs_multiplier > 0.0);
        } else {
            ++failures;
            // every failure sits within 1e-2 of the multiplier zero
            CHECK(std::abs(p.eps - kNeumannResonance) <= 1e-2);
            CHECK(p.resonance_distance <= 1e-2);
        }
    }
    CHECK(failures >= 2);
    CHECK(converged >= 10);
}

TEST_CASE("scan results do not depend on the thread count") {
    const ModelContext ctx = build_context(bridge::benchmark_A(6, 6));
    const DomainSpec domain;
    const auto grid = epsilon_grid_real(0.055, 0.095, 9);
    const auto one = scan_epsilon(ctx, grid, domain, nullptr, scan_opts(true, 1));
    const auto four = scan_epsilon(ctx, grid, domain, nullptr, scan_opts(true, 4));
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].eps == four[i].eps);
        CHECK(one[i].attempted == four[i].attempted);
        CHECK(one[i].status == four[i].status);
        CHECK(one[i].iterations == four[i].iterations);
        CHECK(one[i].residual_raw == four[i].residual_raw);
        CHECK(one[i].solution_norm == four[i].solution_norm);
    }
}

TEST_CASE("strict scan: only domain points are attempted, and all of them converge") {
    const ModelContext ctx = build_context(bridge::benchmark_A(6, 6));
    DomainSpec domain;  // parabolic, sigma = 0.05: annulus (0.05, 0.1) on the real axis
    const auto grid = epsilon_grid_real(0.04, 0.11, 8);
    const auto points = scan_epsilon(ctx, grid, domain, nullptr, scan_opts(true, 1));

    int attempted = 0;
    for (const auto& p : points) {
        CHECK(p.in_domain == domain.contains(p.eps));
        CHECK(p.attempted == p.in_domain);
        if (p.attempted) {
            ++attempted;
            CHECK(p.status == FixedPointStatus::Converged);
            CHECK(p.contraction < 1.0);
            CHECK(p.residual_scaled < 1e-9);
        } else {
            CHECK(p.error.empty());
            CHECK(p.residual_raw == 0.0);
        }
    }
    CHECK(attempted == 4);  // 0.06, 0.07, 0.08, 0.09
}

TEST_CASE("residual-order fit: the truncated expansion scales like |eps|^(order+1)") {
    const ModelContext ctx = build_context(bridge::benchmark_A(8, 8));
    for (int M : {1, 3}) {
        LindstedtOptions lo;
        lo.order = M;
        const LindstedtSeries s = expand_response(ctx, lo);
        std::vector<Complex> eps;
        for (int i = 0; i < 6; ++i) eps.emplace_back(std::pow(2.0, -4 - i), 0.0);
        const ResidualOrderFit fit = fit_residual_order(ctx, s, eps);
        CHECK(fit.expected == M + 1);
        CHECK(fit.skipped_underflow == 0);
        CHECK(std::abs(fit.slope - (M + 1)) < 0.3);
        CHECK(fit.r_squared > 0.999);
        REQUIRE(fit.eps_abs.size() == eps.size());
    }
}

TEST_CASE("residual-order fit core: exact power law, underflow floor, rejection") {
    const std::vector<double> x{0.1, 0.2, 0.4};
    std::vector<double> y;
    for (double v : x) y.push_back(2.5 * v * v * v);
    const ResidualOrderFit exact = fit_residual_points(x, y, 3, 1e-14);
    CHECK(exact.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(exact.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact.skipped_underflow == 0);

    const ResidualOrderFit drowned =
        fit_residual_points(x, {1e-16, 3e-17, 2e-16}, 2, 1e-14);
    CHECK(std::isnan(drowned.slope));
    CHECK(drowned.skipped_underflow == 3);

    const ResidualOrderFit lone = fit_residual_points(x, {1e-3, 1e-16, 5e-17}, 2, 1e-14);
    CHECK(std::isnan(lone.slope));
    CHECK(lone.skipped_underflow == 2);
}

TEST_CASE("circle-mean analyticity probe on the benchmark") {
    const ModelContext ctx = build_context(bridge::benchmark_A(6, 6));
    DomainSpec domain;  // parabolic, sigma = 0.05
    const CauchyCheck check =
        cauchy_check(ctx, Complex(0.06, 0.0), 0.0125, 16, domain, nullptr);
    CHECK(check.domain_ok);
    CHECK(check.failures == 0);
    CHECK(check.center_defect < 1e-10);
    REQUIRE(check.coeff_sups.size() == 9);
    // the circle contributions c_p r^p decay geometrically (analyticity)
    const auto circle_term = [&](int p) {
        return check.coeff_sups[p] * std::pow(check.radius, p);
    };
    CHECK(circle_term(4) < 1e-2 * circle_term(1));
    CHECK(circle_term(8) < 1e-2 * circle_term(4));

    CHECK_THROWS_WITH_AS(
        cauchy_check(ctx, Complex(0.06, 0.0), 0.059, 16, domain, nullptr),
        doctest::Contains("leaves the epsilon domain"), ConfigError);
    CHECK_THROWS_AS(cauchy_check(ctx, Complex(0.06, 0.0), 0.01, 4, domain, nullptr),
                    ConfigError);
}

TEST_CASE("configuration parser: values land, defaults follow the variant") {
    const std::string text = R"(
# benchmark run
[model]
variant = A
bc = dirichlet
omega = 1
h = poly 0 1 0 0.1
forcing = cos 1 1 0.1

[truncation]
k_theta = 6
n_x = 6

[norm]
rho = 0.05
j = 2
m = 2

[domain]
sigma = 0.04

[scan]
kind = real
lo = 0.05
hi = 0.07
count = 3
strict = false

[solve]
eps = 0.05 0.01
)";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.model.variant == Variant::A);
    CHECK(cfg.model.trunc.bc == BoundaryCondition::Dirichlet);
    CHECK(cfg.model.trunc.k_theta == 6);
    REQUIRE(cfg.model.forcing.size() == 1);
    // cos amplitude 0.1 splits in half across +-k
    CHECK(cfg.model.forcing[0].value == Complex(0.05, 0.0));
    CHECK(cfg.model.forcing[0].n == 1);
    CHECK(cfg.domain.kind == DomainSpec::Kind::Parabolic);  // variant-derived default
    CHECK(cfg.domain.sigma == 0.04);
    REQUIRE(cfg.scan_grid.size() == 3);
    CHECK(cfg.scan_grid[1].real() == doctest::Approx(0.06).epsilon(1e-14));
    CHECK(cfg.scan_grid[1].imag() == 0.0);
    CHECK_FALSE(cfg.scan.strict);
    CHECK(cfg.solve_eps == Complex(0.05, 0.01));
    CHECK(cfg.scan.norm.rho == 0.05);

    // variant B defaults to the sector domain
    const RunConfig b = parse_config("[model]\nvariant = B\nbc = neumann\nh = poly 0 1\n");
    CHECK(b.domain.kind == DomainSpec::Kind::Sector);
}

TEST_CASE("configuration parser: malformed input is rejected with context") {
    CHECK_THROWS_WITH_AS(parse_config("[scan]\nbogus = 1\n"),
                         doctest::Contains("unknown key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[nosuch]\nx = 1\n"),
                         doctest::Contains("unknown section"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[norm]\nrho = 0.05\nrho = 0.1\n"),
                         doctest::Contains("duplicate"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[model]\nvariant = C\n"),
                         doctest::Contains("expected A, A', B or B'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[model\nvariant = A\n"),
                         doctest::Contains("unterminated section"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[norm]\nrho\n"),
                         doctest::Contains("expected key = value"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[norm]\nrho = fast\n"),
                         doctest::Contains("expected a number"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/qpresp.ini"), ConfigError);

    // near-resonant frequencies pass only with the check disabled
    CHECK_THROWS_AS(parse_config("[model]\nomega = 1 1.000000000000001\n"), HypothesisError);
    const RunConfig ok =
        parse_config("[model]\nomega = 1 1.000000000000001\nomega_check = false\n");
    CHECK(ok.model.omega.dim() == 2);
}
