#include "qpresp/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qpresp {

const char* to_string(FixedPointStatus s) {
    switch (s) {
        case FixedPointStatus::Converged: return "converged";
        case FixedPointStatus::MaxIterations: return "max_iterations";
        case FixedPointStatus::BallExit: return "ball_exit";
        case FixedPointStatus::MultiplierUnderflow: return "multiplier_underflow";
    }
    return "unknown";
}

SpectralField nonlinear_term(const ModelOperator& mo, Complex eps, const Nonlinearity& h,
                             const VecR& c0_delta, const SpectralField& u) {
    const auto& disc = *u.disc();
    const auto& xt = disc.x_tables();
    Mat grid = u.to_grid();
    switch (mo.variant) {
        case Variant::A:
        case Variant::APrime: {
            if (c0_delta.size() != disc.n_x())
                throw Error("profile coefficients do not match the spatial band");
            const VecR c0g = xt.phi * c0_delta;
            for (Eigen::Index i = 0; i < grid.cols(); ++i) {
                const double x = xt.grid_x[i];
                const Complex h0 = h.eval(0, Complex(c0g[i], 0.0), x);
                const Complex h1 = h.eval(1, Complex(c0g[i], 0.0), x);
                for (Eigen::Index r = 0; r < grid.rows(); ++r) {
                    const Complex v = grid(r, i);
                    grid(r, i) = h.eval(0, c0g[i] + v, x) - h0 - h1 * v;
                }
            }
            break;
        }
        case Variant::B: {
            if (u.basis()->potential_grid.size() == 0)
                throw Error("model-B fields must carry the L_B eigenbasis");
            for (Eigen::Index i = 0; i < grid.cols(); ++i) {
                const double x = xt.grid_x[i];
                const double h1 = u.basis()->potential_grid[i];
                for (Eigen::Index r = 0; r < grid.rows(); ++r) {
                    const Complex v = grid(r, i);
                    grid(r, i) = h.eval(0, v, x) - h1 * v;
                }
            }
            break;
        }
        case Variant::BPrime: {
            for (Eigen::Index i = 0; i < grid.cols(); ++i) {
                const double x = xt.grid_x[i];
                for (Eigen::Index r = 0; r < grid.rows(); ++r)
                    grid(r, i) = eps * h.eval(0, grid(r, i), x);
            }
            break;
        }
    }
    return SpectralField::from_grid(u.basis(), grid);
}

FixedPointResult picard_solve(const ModelOperator& mo, Complex eps, const SpectralField& f,
                              const Nonlinearity& h, const VecR& c0_delta,
                              const SpectralField& start, const FixedPointOptions& opts) {
    FixedPointResult out;
    out.u = start;
    const LinearSolver solver(mo, eps);
    out.min_abs_multiplier = solver.min_abs_multiplier();
    if (solver.min_abs_multiplier() < mo.multiplier_floor) {
        out.status = FixedPointStatus::MultiplierUnderflow;
        return out;
    }
    const bool friction = mo.variant == Variant::A || mo.variant == Variant::APrime;
    const SpectralField rhs0 = friction ? f.minus_average() : f;

    for (int it = 1; it <= opts.max_iterations; ++it) {
        const SpectralField next = solver.invert(rhs0 - nonlinear_term(mo, eps, h, c0_delta, out.u));
        const double step = next.max_abs_diff(out.u);
        out.step_norms.push_back(step);
        out.u = next;
        out.iterations = it;
        if (out.u.max_abs_coeff() > opts.ball_radius) {
            out.status = FixedPointStatus::BallExit;
            break;
        }
        if (step <= opts.tolerance * std::max(1.0, out.u.max_abs_coeff())) {
            out.status = FixedPointStatus::Converged;
            break;
        }
        if (it == opts.max_iterations) out.status = FixedPointStatus::MaxIterations;
    }

    std::vector<double> ratios;
    for (std::size_t i = 1; i < out.step_norms.size(); ++i)
        if (out.step_norms[i - 1] > 0.0) ratios.push_back(out.step_norms[i] / out.step_norms[i - 1]);
    if (ratios.size() > 5) ratios.erase(ratios.begin(), ratios.end() - 5);
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        out.contraction = ratios[ratios.size() / 2];
    }
    return out;
}

namespace {

using CLong = std::complex<long double>;

CLong to_long(Complex z) { return CLong(z.real(), z.imag()); }

}  // namespace

HullResidual hull_residual(const ModelOperator& mo, Complex eps, const SpectralField& u,
                           const SpectralField& f, const Nonlinearity& h,
                           const VecR& c0_delta, const NormParams* np) {
    const auto& disc = *u.disc();
    const auto& xt = disc.x_tables();
    const int T = disc.n_theta_modes();
    const int N = disc.n_x();
    const bool friction = mo.variant == Variant::A || mo.variant == Variant::APrime;
    if (friction && eps == Complex(0.0, 0.0)) throw Error("residual undefined at eps = 0");

    // Everything in -Delta coordinates, where -Delta acts diagonally and the
    // composed nonlinearity comes straight off the collocation grid.
    const auto to_delta = [](const SpectralField& w) -> Mat {
        if (w.basis_tag() == SourceTag::MinusDelta) return w.coeffs();
        return w.coeffs() * w.basis()->q.transpose().cast<Complex>();
    };
    Mat u_delta = to_delta(u);
    Mat full_grid = u.to_grid();
    if (friction) {
        if (c0_delta.size() != N) throw Error("profile coefficients do not match the spatial band");
        const VecR c0g = xt.phi * c0_delta;
        for (Eigen::Index i = 0; i < full_grid.cols(); ++i)
            full_grid.col(i).array() += c0g[i];
        u_delta.row(disc.zero_mode()) += c0_delta.transpose().cast<Complex>();
    }
    Mat h_grid(full_grid.rows(), full_grid.cols());
    for (Eigen::Index i = 0; i < full_grid.cols(); ++i)
        for (Eigen::Index r = 0; r < full_grid.rows(); ++r)
            h_grid(r, i) = h.eval(0, full_grid(r, i), xt.grid_x[i]);
    const Mat h_delta = disc.grid_to_coeffs(h_grid);
    const Mat f_delta = to_delta(f);

    const CLong e = to_long(eps);
    HullResidual out;
    Mat res_delta = Mat::Zero(T, N);
    for (int r = 0; r < T; ++r) {
        const long double tau = static_cast<long double>(kTwoPi) * mo.omega.dot(disc.k_of(r));
        for (int n = 0; n < N; ++n) {
            const long double ld = disc.lambda_delta()[n];
            CLong alpha, beta_h, beta_f;
            switch (mo.variant) {
                case Variant::A:
                    alpha = e * (ld - tau * tau) + CLong(0.0L, tau);
                    beta_h = beta_f = e;
                    break;
                case Variant::APrime:
                    alpha = e * (ld - tau * tau) - CLong(0.0L, tau * ld);
                    beta_h = beta_f = e;
                    break;
                case Variant::B:
                    alpha = -e * e * tau * tau + CLong(ld, tau);
                    beta_h = beta_f = CLong(1.0L, 0.0L);
                    break;
                case Variant::BPrime:
                    alpha = -e * e * tau * tau + CLong(ld, tau);
                    beta_h = e;
                    beta_f = CLong(1.0L, 0.0L);
                    break;
            }
            const CLong res = alpha * to_long(u_delta(r, n)) + beta_h * to_long(h_delta(r, n)) -
                              beta_f * to_long(f_delta(r, n));
            res_delta(r, n) = Complex(static_cast<double>(res.real()),
                                      static_cast<double>(res.imag()));
            out.raw_sup = std::max(out.raw_sup, static_cast<double>(std::abs(res)));
            out.forcing_sup = std::max(out.forcing_sup, std::abs(f_delta(r, n)));
        }
    }
    const double scale = friction ? 1.0 / std::abs(eps) : 1.0;
    out.scaled_sup = out.raw_sup * scale;
    out.relative = out.scaled_sup / std::max(1.0, out.forcing_sup);
    if (np != nullptr) {
        SpectralField rf = SpectralField::zero(u.basis());
        rf.coeffs() = u.basis_tag() == SourceTag::MinusDelta
                          ? res_delta
                          : Mat(res_delta * u.basis()->q.cast<Complex>());
        out.norm_raw = norm(rf, *np);
        out.norm_scaled = out.norm_raw * scale;
    }
    return out;
}

ContractionEstimate contraction_estimate(const ModelOperator& mo, Complex eps,
                                         const Nonlinearity& h, const VecR& c0_delta,
                                         double ball_radius) {
    ContractionEstimate out;
    out.ball_radius = ball_radius;
    const GammaBound gb = gamma_lower_bound(mo, eps);
    out.gamma_value = gb.value;
    const bool friction = mo.variant == Variant::A || mo.variant == Variant::APrime;
    const double sq = std::sqrt(std::max(gb.value, 0.0));
    out.inverse_bound = sq > 0.0 ? (friction ? std::abs(eps) / sq : 1.0 / sq)
                                 : std::numeric_limits<double>::infinity();
    const LinearSolver solver(mo, eps);
    out.grid_inverse =
        solver.min_abs_multiplier() > 0.0 ? 1.0 / solver.min_abs_multiplier()
                                          : std::numeric_limits<double>::infinity();

    // Lipschitz bound of the nonlinear term on the |v| <= r coefficient ball,
    // sampled over the collocation points and the circle |v| = r (max-modulus
    // points of the analytic derivative).
    const auto& xt = mo.basis->disc->x_tables();
    VecR baseg = VecR::Zero(xt.grid_x.size());
    if (c0_delta.size() != 0) baseg = xt.phi * c0_delta;
    const int order = mo.variant == Variant::BPrime ? 1 : 2;
    double dmax = 0.0;
    for (Eigen::Index i = 0; i < xt.grid_x.size(); ++i) {
        for (int a = 0; a < 16; ++a) {
            const double phi = kTwoPi * a / 16.0;
            const Complex v = ball_radius * Complex(std::cos(phi), std::sin(phi));
            dmax = std::max(dmax, std::abs(h.eval(order, baseg[i] + v, xt.grid_x[i])));
        }
        dmax = std::max(dmax, std::abs(h.eval(order, Complex(baseg[i], 0.0), xt.grid_x[i])));
    }
    switch (mo.variant) {
        case Variant::A:
        case Variant::APrime:
        case Variant::B:
            out.lipschitz = dmax * ball_radius;
            break;
        case Variant::BPrime:
            out.lipschitz = std::abs(eps) * dmax;
            break;
    }
    out.contraction = out.inverse_bound * out.lipschitz;
    return out;
}

double contraction_pairs(const ModelOperator& mo, Complex eps, const SpectralField& f,
                         const Nonlinearity& h, const VecR& c0_delta,
                         const SpectralField& center, double radius, int n_pairs,
                         std::uint64_t seed, const NormParams& np) {
    if (n_pairs < 1) throw ConfigError("pair sampling needs n_pairs >= 1");
    const LinearSolver solver(mo, eps);
    if (solver.min_abs_multiplier() < mo.multiplier_floor)
        throw MultiplierUnderflowError("linear multiplier below floor while sampling pairs");
    const bool friction = mo.variant == Variant::A || mo.variant == Variant::APrime;
    const SpectralField rhs0 = friction ? f.minus_average() : f;
    const auto apply_map = [&](const SpectralField& w) {
        return solver.invert(rhs0 - nonlinear_term(mo, eps, h, c0_delta, w));
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    const auto draw = [&]() {
        SpectralField r = random_field(center.basis(), np, rng());
        const double nr = norm(r, np);
        if (nr > 0.0) r *= Complex(radius * unif(rng) / nr, 0.0);
        SpectralField w = center;
        w += r;
        return w;
    };

    double worst = 0.0;
    for (int p = 0; p < n_pairs; ++p) {
        const SpectralField u = draw();
        const SpectralField v = draw();
        const double den = norm(u - v, np);
        if (den == 0.0) continue;
        worst = std::max(worst, norm(apply_map(u) - apply_map(v), np) / den);
    }
    return worst;
}

}  // namespace qpresp
