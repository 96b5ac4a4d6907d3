#include "qpresp/lindstedt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qpresp {

NonresonanceDiagnostic nonresonance_order(const Frequency& omega, int k_max, double rho) {
    NonresonanceDiagnostic out;
    double raw_sup = -std::numeric_limits<double>::infinity();
    VecI raw_k;
    for (const auto& k : enumerate_l1_ball(omega.dim(), k_max)) {
        const double dk = std::abs(omega.dot(k));
        if (dk == 0.0) {
            out.sup = std::numeric_limits<double>::infinity();
            out.k = k;
            out.max_order = 0;
            return out;
        }
        const double val = -std::log(dk) / k.cwiseAbs().sum();
        if (val > raw_sup) {
            raw_sup = val;
            raw_k = k;
        }
    }
    if (raw_sup <= 0.0) {
        out.sup = 0.0;
        out.unbounded = true;
        out.max_order = std::numeric_limits<int>::max();
    } else {
        out.sup = raw_sup;
        out.k = raw_k;
        out.max_order = static_cast<int>(std::floor(kTwoPi * rho / raw_sup));
    }
    return out;
}

namespace {

using JetGrid = std::vector<Mat>;

// c_m = sum_{b >= 1} a_{m-b} u_b (Hadamard), truncated at cap.  The order-0
// slice of u is the expansion base point and never enters here.
JetGrid jet_mul_tail(const JetGrid& a, const JetGrid& u, int cap) {
    JetGrid c(cap + 1, Mat::Zero(a[0].rows(), a[0].cols()));
    const int u_top = static_cast<int>(u.size()) - 1;
    const int a_top = static_cast<int>(a.size()) - 1;
    for (int m = 0; m <= cap; ++m)
        for (int b = 1; b <= std::min(m, u_top); ++b)
            if (m - b <= a_top) c[m] += a[m - b].cwiseProduct(u[b]);
    return c;
}

// Jet of h(profile(x) + u(eps), x) on the collocation grid, orders 0..cap.
// u[m] holds the grid of the order-m series coefficient; u[0] (if present)
// shifts the pointwise expansion base, so the derivative stack stays exact
// for any analytic nonlinearity.
JetGrid compose_jet(const Nonlinearity& h, const Discretization& disc,
                    const VecR& profile_delta, const JetGrid& u, int cap) {
    const auto& xt = disc.x_tables();
    const Eigen::Index rows = disc.n_theta_grid();
    const Eigen::Index cols = xt.grid_x.size();
    Mat base = Mat::Zero(rows, cols);
    if (profile_delta.size() != 0) {
        const VecR pg = xt.phi * profile_delta;
        for (Eigen::Index i = 0; i < cols; ++i) base.col(i).array() += pg[i];
    }
    if (!u.empty()) base += u[0];

    std::vector<Mat> d(cap + 1);
    double factorial = 1.0;
    for (int p = 0; p <= cap; ++p) {
        if (p > 1) factorial *= p;
        Mat dp(rows, cols);
        for (Eigen::Index i = 0; i < cols; ++i)
            for (Eigen::Index r = 0; r < rows; ++r)
                dp(r, i) = h.eval(p, base(r, i), xt.grid_x[i]) / factorial;
        d[p] = std::move(dp);
    }
    int top = cap;
    while (top > 0 && d[top].cwiseAbs().maxCoeff() == 0.0) --top;

    JetGrid res(cap + 1, Mat::Zero(rows, cols));
    res[0] = d[top];
    for (int p = top - 1; p >= 0; --p) {
        res = jet_mul_tail(res, u, cap);
        res[0] += d[p];
    }
    return res;
}

// Grid of a theta-independent derivative profile h^(p)(c0(x), x).
Mat derivative_profile(const Nonlinearity& h, const Discretization& disc,
                       const VecR& profile_delta, int p) {
    const auto& xt = disc.x_tables();
    const Eigen::Index rows = disc.n_theta_grid();
    const Eigen::Index cols = xt.grid_x.size();
    VecR pg = VecR::Zero(cols);
    if (profile_delta.size() != 0) pg = xt.phi * profile_delta;
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < cols; ++i)
        out.col(i).setConstant(h.eval(p, Complex(pg[i], 0.0), xt.grid_x[i]));
    return out;
}

SpectralField omega_grad2(const SpectralField& u, const Frequency& omega) {
    return apply_omega_grad(apply_omega_grad(u, omega), omega);
}

}  // namespace

SpectralField LindstedtSeries::evaluate(Complex eps, int order_cap) const {
    if (terms.empty()) throw Error("cannot evaluate an empty expansion");
    int top = order();
    if (order_cap >= 0) top = std::min(top, order_cap);
    SpectralField acc = terms[top];
    for (int n = top - 1; n >= 0; --n) {
        acc *= eps;
        acc += terms[n];
    }
    return acc;
}

LindstedtSeries lindstedt_expand(const ModelOperator& mo, const SpectralField& f,
                                 const Nonlinearity& h, const VecR& c0_delta,
                                 const SpectralField& u0, const LindstedtOptions& opts) {
    if (opts.order < 1) throw ConfigError("expansion order must be at least 1");
    const EllipticPtr& basis = mo.basis;
    if (f.basis() != basis) throw Error("forcing is not in the operator's working basis");
    const auto& disc = *basis->disc;
    const int M = opts.order;
    const int N_x = disc.n_x();
    const int T = disc.n_theta_modes();

    LindstedtSeries series;
    series.variant = mo.variant;
    series.terms.assign(M + 1, SpectralField::zero(basis));
    series.c0 = c0_delta;

    JetGrid grids;  // grids[m] = collocation values of U_m

    const bool profile_models = mo.variant == Variant::A || mo.variant == Variant::APrime;
    if (profile_models && c0_delta.size() != N_x)
        throw Error("profile coefficients do not match the spatial band");

    if (profile_models) {
        // eps-multiplied hierarchy: D U_N = -(omega.grad)^2 U_{N-1} - L U_{N-1}
        // - S_{N-1} (+ f - <f> at N = 1), with D = omega.grad (A) or
        // (omega.grad) Delta (A'); <U_{N-1}> is fixed by solvability of order N.
        const bool dense_L = mo.variant == Variant::APrime;
        Eigen::PartialPivLU<Mat> L_lu;
        if (dense_L) L_lu.compute(mo.L->matrix.cast<Complex>());
        const auto solve_principal = [&](const SpectralField& rhs) {
            SpectralField w = solve_omega_grad(rhs, mo.omega, opts.divisor_floor);
            if (mo.variant == Variant::APrime)
                for (int n = 0; n < N_x; ++n)
                    w.coeffs().col(n) /= Complex(-disc.lambda_delta()[n], 0.0);
            return w;
        };
        const auto apply_L = [&](const SpectralField& u) {
            return dense_L ? apply_operator(*mo.L, u) : apply_elliptic(u);
        };

        const SpectralField ftilde = f.minus_average();
        series.terms[1] = solve_principal(ftilde);
        grids.push_back(Mat::Zero(disc.n_theta_grid(), disc.x_tables().grid_x.size()));

        for (int N = 2; N <= M; ++N) {
            const JetGrid hjet = compose_jet(h, disc, c0_delta, grids, N - 1);
            const SpectralField s = SpectralField::from_grid(basis, hjet[N - 1]);
            Vec avg;
            if (dense_L)
                avg = L_lu.solve((-s.theta_average()).eval());
            else
                avg = -s.theta_average().cwiseQuotient(basis->lambda.cast<Complex>());
            series.terms[N - 1].set_theta_average(avg);
            grids.push_back(series.terms[N - 1].to_grid());

            SpectralField rhs = omega_grad2(series.terms[N - 1], mo.omega);
            rhs += apply_L(series.terms[N - 1]);
            rhs += s;
            rhs *= Complex(-1.0);
            series.terms[N] = solve_principal(rhs);
        }
        grids.push_back(series.terms[M].to_grid());
    } else if (mo.variant == Variant::B) {
        if (u0.basis() != basis || basis->tag != SourceTag::LOperator ||
            basis->potential_grid.size() == 0)
            throw Error("model-B expansion needs the zeroth order in the L_B eigenbasis");
        series.terms[0] = u0;
        grids.push_back(u0.to_grid());

        // tilde-Gamma = omega.grad + L_B + [h'(U0) - h'(0)] has a
        // theta-dependent potential; invert by iterating off the diagonal part.
        Mat v = grids[0];
        const auto& xt = disc.x_tables();
        for (Eigen::Index i = 0; i < v.cols(); ++i)
            for (Eigen::Index r = 0; r < v.rows(); ++r)
                v(r, i) = h.eval(1, grids[0](r, i), xt.grid_x[i]) - basis->potential_grid[i];
        Mat gamma(T, N_x);
        for (int r = 0; r < T; ++r) {
            const double tau = kTwoPi * mo.omega.dot(disc.k_of(r));
            for (int n = 0; n < N_x; ++n) gamma(r, n) = Complex(basis->lambda[n], tau);
        }
        const auto solve_tilde = [&](const SpectralField& r) {
            const double scale = std::max(1.0, r.max_abs_coeff());
            SpectralField w = r;
            w.coeffs() = r.coeffs().cwiseQuotient(gamma);
            for (int it = 0; it < opts.potential_max_iterations; ++it) {
                SpectralField vw = SpectralField::from_grid(basis, v.cwiseProduct(w.to_grid()));
                SpectralField next = r - vw;
                next.coeffs() = next.coeffs().cwiseQuotient(gamma);
                const double step = next.max_abs_diff(w);
                w = std::move(next);
                if (step <= opts.potential_tolerance * scale) return w;
            }
            throw Error("theta-dependent linear solve in the expansion did not converge");
        };

        for (int N = 1; N <= M; ++N) {
            const JetGrid hjet = compose_jet(h, disc, VecR(), grids, N);
            SpectralField rhs = SpectralField::from_grid(basis, hjet[N]);
            if (N >= 2) rhs += omega_grad2(series.terms[N - 2], mo.omega);
            rhs *= Complex(-1.0);
            series.terms[N] = solve_tilde(rhs);
            grids.push_back(series.terms[N].to_grid());
        }
    } else {  // Variant::BPrime
        if (u0.basis() != basis || basis->tag != SourceTag::MinusDelta)
            throw Error("model-B' expansion operates in -Delta coordinates");
        series.terms[0] = u0;
        grids.push_back(u0.to_grid());
        const auto solve_lambda = [&](SpectralField rhs) {
            for (int r = 0; r < T; ++r) {
                const double tau = kTwoPi * mo.omega.dot(disc.k_of(r));
                for (int n = 0; n < N_x; ++n)
                    rhs.coeffs()(r, n) /= Complex(disc.lambda_delta()[n], tau);
            }
            return rhs;
        };
        for (int N = 1; N <= M; ++N) {
            const JetGrid hjet = compose_jet(h, disc, VecR(), grids, N - 1);
            SpectralField rhs = SpectralField::from_grid(basis, hjet[N - 1]);
            if (N >= 2) rhs += omega_grad2(series.terms[N - 2], mo.omega);
            rhs *= Complex(-1.0);
            series.terms[N] = solve_lambda(std::move(rhs));
            grids.push_back(series.terms[N].to_grid());
        }
    }

    // Independent per-order defect: re-expand the composed nonlinearity from
    // the finished terms and evaluate each order of the governing hierarchy.
    series.order_residuals.assign(M + 1, 0.0);
    const JetGrid full = compose_jet(h, disc, profile_models ? c0_delta : VecR(), grids, M);
    if (profile_models) {
        const Mat hp = derivative_profile(h, disc, c0_delta, 1);
        const Mat h0 = derivative_profile(h, disc, c0_delta, 0);
        const SpectralField ftilde = f.minus_average();
        for (int N = 1; N <= M; ++N) {
            // [eps^m] of G(U) = h(c0+U) - h(c0) - h'(c0) U from the raw jet
            Mat g = full[N - 1] - hp.cwiseProduct(grids[N - 1]);
            if (N == 1) g -= h0;
            SpectralField r =
                mo.variant == Variant::A
                    ? apply_omega_grad(series.terms[N], mo.omega)
                    : Complex(-1.0) * apply_omega_grad(apply_elliptic(series.terms[N]), mo.omega);
            r += omega_grad2(series.terms[N - 1], mo.omega);
            r += mo.variant == Variant::A ? apply_elliptic(series.terms[N - 1])
                                          : apply_operator(*mo.L, series.terms[N - 1]);
            r += SpectralField::from_grid(basis, g);
            if (N == 1) r -= ftilde;
            series.order_residuals[N] = r.max_abs_coeff();
        }
    } else if (mo.variant == Variant::B) {
        const Mat hp0 = derivative_profile(h, disc, VecR(), 1);
        for (int N = 0; N <= M; ++N) {
            SpectralField r = apply_omega_grad(series.terms[N], mo.omega);
            r += apply_elliptic(series.terms[N]);
            r += SpectralField::from_grid(basis, (full[N] - hp0.cwiseProduct(grids[N])).eval());
            if (N >= 2) r += omega_grad2(series.terms[N - 2], mo.omega);
            if (N == 0) r -= f;
            series.order_residuals[N] = r.max_abs_coeff();
        }
    } else {
        for (int N = 0; N <= M; ++N) {
            SpectralField r = apply_omega_grad(series.terms[N], mo.omega);
            r += apply_elliptic(series.terms[N]);
            if (N >= 1) r += SpectralField::from_grid(basis, full[N - 1]);
            if (N >= 2) r += omega_grad2(series.terms[N - 2], mo.omega);
            if (N == 0) r -= f;
            series.order_residuals[N] = r.max_abs_coeff();
        }
    }
    return series;
}

}  // namespace qpresp
