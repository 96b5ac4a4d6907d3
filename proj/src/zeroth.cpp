#include "qpresp/zeroth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qpresp {

namespace {

// h^(p)(c(x), x) on the collocation grid; c given in -Delta coordinates.
// The result must be real (real-coefficient nonlinearity on real arguments).
VecR eval_h_on_grid(const Discretization& disc, const Nonlinearity& h, int p,
                    const VecR& c_delta) {
    const auto& xt = disc.x_tables();
    const VecR vals = xt.phi * c_delta;
    VecR out(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        const Complex v = h.eval(p, Complex(vals[i], 0.0), xt.grid_x[i]);
        if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
            throw Error("nonlinearity is not real on real arguments");
        out[i] = v.real();
    }
    return out;
}

VecR profile_residual(const Discretization& disc, const Nonlinearity& h,
                      const VecR& favg, const VecR& c) {
    const auto& xt = disc.x_tables();
    const VecR hg = eval_h_on_grid(disc, h, 0, c);
    return xt.lambda_delta.cwiseProduct(c) +
           xt.phi.transpose() * xt.weights.cwiseProduct(hg) - favg;
}

}  // namespace

ZerothProfile solve_c0(const DiscretizationPtr& disc, const Nonlinearity& h,
                       const VecR& favg_delta, const VecR& start_delta,
                       const NewtonOptions& opts) {
    const auto& xt = disc->x_tables();
    const int N = disc->n_x();
    if (favg_delta.size() != N || start_delta.size() != N)
        throw Error("profile coefficient size does not match the spatial band");

    ZerothProfile out;
    out.c0 = start_delta;
    const double scale = std::max(1.0, favg_delta.norm());
    VecR res = profile_residual(*disc, h, favg_delta, out.c0);
    double res_norm = res.norm();

    for (int it = 0; it < opts.max_iterations; ++it) {
        out.iterations = it;
        out.residual = res_norm;
        if (res_norm <= opts.tolerance * scale) {
            out.converged = true;
            return out;
        }
        const VecR hp = eval_h_on_grid(*disc, h, 1, out.c0);
        MatR jac = xt.phi.transpose() * xt.weights.cwiseProduct(hp).asDiagonal() * xt.phi;
        jac.diagonal() += xt.lambda_delta;
        const VecR step = Eigen::PartialPivLU<MatR>(jac).solve(-res);
        if (!step.allFinite()) return out;

        double t = 1.0;
        bool accepted = false;
        for (int half = 0; half <= opts.max_halvings; ++half, t *= 0.5) {
            const VecR cand = out.c0 + t * step;
            VecR cand_res;
            try {
                cand_res = profile_residual(*disc, h, favg_delta, cand);
            } catch (const PoleProximityError&) {
                continue;  // backtrack away from the nonlinearity pole
            }
            const double cand_norm = cand_res.norm();
            if (cand_norm < res_norm || cand_norm <= opts.tolerance * scale) {
                out.c0 = cand;
                res = std::move(cand_res);
                res_norm = cand_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) return out;  // stalled line search
    }
    out.residual = res_norm;
    out.converged = res_norm <= opts.tolerance * scale;
    return out;
}

std::vector<ZerothBranch> multistart_c0(const DiscretizationPtr& disc, const Nonlinearity& h,
                                        const VecR& favg_delta, const MultistartOptions& opts) {
    const auto& xt = disc->x_tables();
    const int N = disc->n_x();
    std::vector<VecR> starts;
    for (double v : opts.constant_starts) {
        const VecR grid = VecR::Constant(xt.grid_x.size(), v);
        starts.push_back(disc->profile_from_grid_real(grid));
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int s = 0; s < opts.random_starts; ++s) {
        VecR c(N);
        for (int n = 0; n < N; ++n)
            c[n] = opts.random_amplitude * gauss(rng) / (1.0 + std::sqrt(xt.lambda_delta[n]));
        starts.push_back(std::move(c));
    }

    std::vector<ZerothBranch> branches;
    for (const auto& c0 : starts) {
        ZerothProfile prof;
        try {
            prof = solve_c0(disc, h, favg_delta, c0, opts.newton);
        } catch (const PoleProximityError&) {
            continue;
        }
        if (!prof.converged) continue;
        const bool duplicate = std::any_of(
            branches.begin(), branches.end(), [&](const ZerothBranch& b) {
                return (b.profile.c0 - prof.c0).norm() <=
                       opts.dedup_tol * std::max(1.0, prof.c0.norm());
            });
        if (duplicate) continue;
        ZerothBranch branch;
        branch.profile = std::move(prof);
        const EllipticPtr L = build_L(disc, h, branch.profile.c0, /*require_h2=*/false);
        branch.lambda1 = L->lambda[0];
        branch.h2_ok = L->h2_ok;
        branches.push_back(std::move(branch));
    }
    std::sort(branches.begin(), branches.end(), [](const ZerothBranch& a, const ZerothBranch& b) {
        const double na = a.profile.c0.norm(), nb = b.profile.c0.norm();
        if (na != nb) return na < nb;
        return a.lambda1 > b.lambda1;
    });
    return branches;
}

namespace {

// G_B(u) = h(u, x) - h'(0, x) u  pointwise on the grid, projected to the band.
SpectralField modelB_remainder(const SpectralField& u, const Nonlinearity& h) {
    const EllipticPtr& basis = u.basis();
    if (basis->tag != SourceTag::LOperator || basis->potential_grid.size() == 0)
        throw Error("model-B zeroth order needs fields in the L_B eigenbasis");
    const auto& xt = basis->disc->x_tables();
    Mat grid = u.to_grid();
    for (Eigen::Index i = 0; i < grid.cols(); ++i) {
        const double x = xt.grid_x[i];
        const double hp0 = basis->potential_grid[i];
        for (Eigen::Index r = 0; r < grid.rows(); ++r)
            grid(r, i) = h.eval(0, grid(r, i), x) - hp0 * grid(r, i);
    }
    return SpectralField::from_grid(basis, grid);
}

}  // namespace

ZerothField solve_U0_modelB(const SpectralField& f, const Nonlinearity& h,
                            const Frequency& omega, const PicardZeroOptions& opts) {
    if (!h.h0_zero()) throw HypothesisError("h(0)=0", "model B requires h(0, x) = 0");
    const EllipticPtr& basis = f.basis();
    if (basis->tag != SourceTag::LOperator)
        throw Error("model-B zeroth order needs the forcing in the L_B eigenbasis");
    const auto& d = *basis->disc;
    const int T = d.n_theta_modes();
    const int N = d.n_x();

    Mat gamma(T, N);  // diagonal multipliers of omega.grad + L_B
    for (int r = 0; r < T; ++r) {
        const double tau = kTwoPi * omega.dot(d.k_of(r));
        for (int n = 0; n < N; ++n) gamma(r, n) = Complex(basis->lambda[n], tau);
    }

    ZerothField out;
    out.u0 = SpectralField::zero(basis);
    const double scale = std::max(1.0, f.max_abs_coeff());
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const SpectralField rhs = f - modelB_remainder(out.u0, h);
        SpectralField next = out.u0;
        next.coeffs() = rhs.coeffs().cwiseQuotient(gamma);
        out.iterations = it;
        out.last_step = next.max_abs_diff(out.u0);
        out.u0 = std::move(next);
        if (out.u0.max_abs_coeff() > opts.ball_radius) {
            out.status = IterationStatus::BallExit;
            return out;
        }
        if (out.last_step <= opts.tolerance * scale) {
            out.status = IterationStatus::Converged;
            return out;
        }
    }
    out.status = IterationStatus::MaxIterations;
    return out;
}

SpectralField solve_U0_modelBprime(const SpectralField& f, const Frequency& omega) {
    const EllipticPtr& basis = f.basis();
    if (basis->tag != SourceTag::MinusDelta)
        throw Error("model-B' zeroth order operates in -Delta coordinates");
    const auto& d = *basis->disc;
    SpectralField u = f;
    for (int r = 0; r < d.n_theta_modes(); ++r) {
        const double tau = kTwoPi * omega.dot(d.k_of(r));
        for (int n = 0; n < d.n_x(); ++n)
            u.coeffs()(r, n) /= Complex(d.lambda_delta()[n], tau);
    }
    return u;
}

}  // namespace qpresp
