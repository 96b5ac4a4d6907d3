// Picard iteration on the response equation: exactness on linear problems,
// convergence and residuals on the cubic benchmark, failure modes near
// resonances, and the contraction diagnostics.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <qpresp/pipeline.hpp>

#include "support/bridge.hpp"
#include "support/oracles.hpp"

using namespace qpresp;

namespace {

// Resonant eps for the unit-bottom Neumann operator (-Delta + 1, lambda = 1)
// at the k = 1 theta mode: 2 pi i / (4 pi^2 - 1).
const Complex kNeumannResonance{0.0, 0.16329115640316914};

NormParams np_d1() {
    NormParams np;
    np.rho = 0.05;
    np.j = 2;
    np.m = 2;
    return np;
}

}  // namespace

TEST_CASE("picard on a linear problem: one productive step, exact per-mode answer") {
    ModelContext ctx = [] {
        ModelSpec spec = bridge::benchmark_A(4, 4);
        spec.h = Nonlinearity::polynomial({0.0, 1.0});
        return build_context(spec);
    }();
    const Complex eps(0.05, 0.01);
    const FixedPointResult res = solve_response(ctx, eps, zero_start(ctx));
    CHECK(res.status == FixedPointStatus::Converged);
    CHECK(res.iterations <= 2);
    CHECK(std::string(to_string(res.status)) == "converged");

    // with h(u) = u the correction is f / multiplier mode by mode
    const SpectralField f = ctx.forcing;
    SpectralField want = SpectralField::zero(ctx.basis);
    const auto& disc = *ctx.basis->disc;
    for (int r = 0; r < disc.n_theta_modes(); ++r) {
        if (disc.k_of(r)[0] == 0) continue;  // forcing has zero average
        for (int n = 0; n < disc.n_x(); ++n)
            want.coeffs()(r, n) =
                f.coeffs()(r, n) / multiplier(ctx.op, eps, disc.k_of(r), n);
    }
    CHECK(res.u.max_abs_diff(want) < 1e-14);

    // the nonlinear term of the map vanishes identically for linear h
    const SpectralField g = nonlinear_term(ctx.op, eps, ctx.spec.h, ctx.c0, res.u);
    CHECK(g.max_abs_coeff() < 1e-16);
}

TEST_CASE("picard on the cubic benchmark: convergence, residual, step decay") {
    ModelContext ctx = build_context(bridge::benchmark_A(8, 8));
    const Complex eps(0.05, 0.0);
    FixedPointOptions opts;
    const FixedPointResult res = solve_response(ctx, eps, zero_start(ctx), opts);
    REQUIRE(res.status == FixedPointStatus::Converged);
    CHECK(res.min_abs_multiplier > 1.0);
    CHECK(res.contraction > 0.0);
    CHECK(res.contraction < 1.0);

    const NormParams np = np_d1();
    const HullResidual hr = response_residual(ctx, eps, res.u, &np);
    CHECK(hr.relative < 1e-10);
    CHECK(hr.norm_raw >= 0.0);
    CHECK(hr.norm_scaled == doctest::Approx(hr.norm_raw / std::abs(eps)).epsilon(1e-12));

    // the mild benchmark settles almost immediately
    REQUIRE(res.step_norms.size() >= 2);
    CHECK(res.step_norms.back() < res.step_norms.front());

    // cubic nonlinear term: G(U) = h(c0+U) - h(c0) - h'(c0) U = 0.1 U^3 here
    const SpectralField g = nonlinear_term(ctx.op, eps, ctx.spec.h, ctx.c0, res.u);
    const SpectralField cube = Complex(0.1) * multiply(multiply(res.u, res.u), res.u);
    CHECK(g.max_abs_diff(cube) < 5e-14);
}

TEST_CASE("picard with a strong forcing near a resonance: geometric step decay") {
    ModelSpec spec = bridge::benchmark_A_neumann(6, 6);
    spec.forcing[0].value = Complex(2.0, 0.0);
    ModelContext ctx = build_context(spec);
    const FixedPointResult res = solve_response(ctx, Complex(0.0, 0.155), zero_start(ctx));
    REQUIRE(res.status == FixedPointStatus::Converged);
    REQUIRE(res.step_norms.size() >= 4);
    for (std::size_t i = 0; i + 1 < res.step_norms.size(); ++i)
        CHECK(res.step_norms[i + 1] < res.step_norms[i]);
    CHECK(res.contraction > 0.0);
    CHECK(res.contraction < 1.0);
}

TEST_CASE("picard at a resonance fails loudly; the mirrored real eps converges") {
    ModelContext ctx = build_context(bridge::benchmark_A_neumann(8, 8));

    const FixedPointResult bad = solve_response(ctx, kNeumannResonance, zero_start(ctx));
    CHECK(bad.status == FixedPointStatus::MultiplierUnderflow);
    CHECK(std::string(to_string(bad.status)) == "multiplier_underflow");

    const FixedPointResult good =
        solve_response(ctx, Complex(std::abs(kNeumannResonance), 0.0), zero_start(ctx));
    REQUIRE(good.status == FixedPointStatus::Converged);
    CHECK(response_residual(ctx, Complex(std::abs(kNeumannResonance), 0.0), good.u).relative <
          1e-10);
}

TEST_CASE("picard guard rails: ball exit and iteration cap") {
    ModelContext ctx = build_context(bridge::benchmark_A(6, 6));
    const Complex eps(0.05, 0.0);

    FixedPointOptions tight;
    tight.ball_radius = 1e-6;
    const FixedPointResult ball = solve_response(ctx, eps, zero_start(ctx), tight);
    CHECK(ball.status == FixedPointStatus::BallExit);

    FixedPointOptions capped;
    capped.max_iterations = 1;
    const FixedPointResult cap = solve_response(ctx, eps, zero_start(ctx), capped);
    CHECK(cap.status == FixedPointStatus::MaxIterations);
    CHECK(cap.iterations == 1);
}

TEST_CASE("governing-equation residual: zero response and eps = 0 contract") {
    ModelContext ctx = build_context(bridge::benchmark_A(6, 6));
    const Complex eps(0.03, 0.02);
    const HullResidual at_zero = response_residual(ctx, eps, zero_start(ctx));
    // with U = 0 and c0 = 0 the eps-multiplied residual is exactly -eps f
    CHECK(at_zero.scaled_sup == doctest::Approx(at_zero.forcing_sup).epsilon(1e-12));
    CHECK(at_zero.raw_sup ==
          doctest::Approx(std::abs(eps) * at_zero.forcing_sup).epsilon(1e-12));
    CHECK(at_zero.forcing_sup == doctest::Approx(0.05 / std::sqrt(2.0)).epsilon(1e-12));
    // norm fields stay unset without NormParams
    CHECK(at_zero.norm_raw == -1.0);

    CHECK_THROWS_WITH_AS(
        response_residual(ctx, Complex(0.0, 0.0), zero_start(ctx)),
        doctest::Contains("eps = 0"), Error);
}

TEST_CASE("a-priori contraction estimate: bound structure on the Neumann benchmark") {
    ModelContext ctx = build_context(bridge::benchmark_A_neumann(8, 8));
    const Complex eps(0.05, 0.0);
    const double r = 0.1;
    const ContractionEstimate ce =
        contraction_estimate(ctx.op, eps, ctx.spec.h, ctx.c0, r);

    CHECK(ce.ball_radius == r);
    CHECK(ce.gamma_value > 0.0);
    CHECK(ce.inverse_bound ==
          doctest::Approx(std::abs(eps) / std::sqrt(ce.gamma_value)).epsilon(1e-12));
    // the truncated grid can never beat the continuum lower bound
    CHECK(ce.grid_inverse <= ce.inverse_bound * (1.0 + 1e-12));
    CHECK(ce.grid_inverse > 0.0);
    // h'' = 0.6 u on the ball around c0 = 0: sup |h''| = 0.6 r
    CHECK(ce.lipschitz == doctest::Approx(0.6 * r * r).epsilon(1e-12));
    CHECK(ce.contraction == doctest::Approx(ce.inverse_bound * ce.lipschitz).epsilon(1e-15));
    CHECK(ce.contraction < 1.0);
}

TEST_CASE("sampled map contraction: zero for linear h, < 1 on the benchmark, grows near resonance") {
    const NormParams np = np_d1();
    const std::uint64_t seed = 20240817;

    ModelContext lin = [] {
        ModelSpec spec = bridge::benchmark_A(4, 4);
        spec.h = Nonlinearity::polynomial({0.0, 1.0});
        return build_context(spec);
    }();
    const double c_lin =
        contraction_pairs(lin.op, Complex(0.05, 0.0), lin.forcing, lin.spec.h,
                          lin.c0, zero_start(lin), 0.5, 20, seed, np);
    CHECK(c_lin < 1e-14);

    // a small truncation keeps the resonant mode's share of the norm visible
    ModelContext ctx = build_context(bridge::benchmark_A_neumann(2, 2));
    const auto pairs_at = [&](Complex eps) {
        return contraction_pairs(ctx.op, eps, ctx.forcing, ctx.spec.h, ctx.c0,
                                 zero_start(ctx), 0.5, 40, seed, np);
    };
    const double mid = pairs_at(Complex(0.0, 0.05));
    const double near = pairs_at(Complex(0.0, 0.16));
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    // approaching 2 pi i/(4 pi^2 - 1) inflates the inverse and with it the map's
    // empirical Lipschitz constant
    CHECK(near > 2.0 * mid);

    CHECK_THROWS_AS(contraction_pairs(ctx.op, Complex(0.05, 0.0), ctx.forcing, ctx.spec.h,
                                      ctx.c0, zero_start(ctx), 0.5, 0, seed, np),
                    ConfigError);
}

TEST_CASE("full solve agrees with the dense collocation Newton oracle") {
    ModelContext ctx = build_context(bridge::benchmark_A(8, 8));
    const Complex eps(0.05, 0.0);
    const FixedPointResult res = solve_response(ctx, eps, zero_start(ctx));
    REQUIRE(res.status == FixedPointStatus::Converged);

    oracle::HullProblem p;
    p.variant = oracle::HullVariant::A;
    p.dirichlet = true;
    p.omega = 1.0;
    p.K = 8;
    p.N = 8;
    p.eps = eps;
    p.h = bridge::cubic_h;
    p.f_hat = oracle::CMat::Zero(17, 8);
    oracle::add_cos_mode(p.f_hat, 8, 1, 0, 0.1 / std::sqrt(2.0));  // sin(pi x): 0-based here
    const oracle::HullSolution sol = oracle::solve_hull_dense(p);
    REQUIRE(sol.converged);

    const Mat w = bridge::response_rows(res.u, ctx.c0);
    CHECK(bridge::max_abs_diff(w, sol.w_hat) < 1e-8);
}
