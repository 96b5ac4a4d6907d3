#include "qpresp/linear_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qpresp {

namespace {

void require_nonzero_eps(Variant v, Complex eps) {
    if ((v == Variant::A || v == Variant::APrime) && eps == Complex(0.0, 0.0))
        throw Error("the friction multiplier is singular at eps = 0");
}

}  // namespace

Complex multiplier(const ModelOperator& mo, Complex eps, double tau, int n) {
    require_nonzero_eps(mo.variant, eps);
    const double lam = mo.L->lambda[n];
    switch (mo.variant) {
        case Variant::A:
            return -tau * tau + Complex(0.0, tau) / eps + lam;
        case Variant::APrime: {
            const double lam_d = mo.basis->disc->lambda_delta()[n];
            return -tau * tau - Complex(0.0, tau) * lam_d / eps + lam;
        }
        case Variant::B:
        case Variant::BPrime:
            return -eps * eps * tau * tau + Complex(0.0, tau) + lam;
    }
    throw Error("unreachable variant");
}

Complex multiplier(const ModelOperator& mo, Complex eps, const VecI& k, int n) {
    return multiplier(mo, eps, kTwoPi * mo.omega.dot(k), n);
}

LinearSolver::LinearSolver(const ModelOperator& mo, Complex eps) : mo_(mo), eps_(eps) {
    require_nonzero_eps(mo.variant, eps);
    const auto& d = *mo.basis->disc;
    const int T = d.n_theta_modes();
    const int N = d.n_x();
    mult_.resize(T, N);
    min_abs_multiplier_ = std::numeric_limits<double>::infinity();
    for (int r = 0; r < T; ++r) {
        const double tau = kTwoPi * mo.omega.dot(d.k_of(r));
        for (int n = 0; n < N; ++n) {
            mult_(r, n) = multiplier(mo, eps, tau, n);
            min_abs_multiplier_ = std::min(min_abs_multiplier_, std::abs(mult_(r, n)));
        }
    }
    // A' with a nonconstant potential: L does not commute with -Delta, so the
    // solve is a dense (n_x x n_x) block per theta mode.  The diagonal
    // multipliers above remain as the underflow guard (exact when commuting).
    if (mo.variant == Variant::APrime) {
        dense_ = true;
        const VecR& lam_d = d.lambda_delta();
        lu_.reserve(T);
        block_.reserve(T);
        for (int r = 0; r < T; ++r) {
            const double tau = kTwoPi * mo.omega.dot(d.k_of(r));
            Mat m = mo.L->matrix.cast<Complex>();
            m.diagonal().array() += -tau * tau;
            m.diagonal() -= (Complex(0.0, tau) / eps) * lam_d.cast<Complex>();
            block_.push_back(m);
            lu_.emplace_back(m);
        }
    }
}

SpectralField LinearSolver::apply(const SpectralField& u) const {
    if (u.basis() != mo_.basis) throw Error("field is not in the operator's working basis");
    SpectralField w = u;
    if (dense_) {
        for (Eigen::Index r = 0; r < w.coeffs().rows(); ++r)
            w.coeffs().row(r) = u.coeffs().row(r) * block_[r].transpose();
    } else {
        w.coeffs() = u.coeffs().cwiseProduct(mult_);
    }
    return w;
}

SpectralField LinearSolver::invert(const SpectralField& u) const {
    if (u.basis() != mo_.basis) throw Error("field is not in the operator's working basis");
    if (min_abs_multiplier_ < mo_.multiplier_floor) {
        std::ostringstream os;
        os << "min |multiplier| = " << min_abs_multiplier_ << " < floor "
           << mo_.multiplier_floor << " at eps = " << eps_;
        throw MultiplierUnderflowError(os.str());
    }
    SpectralField w = u;
    if (dense_) {
        for (Eigen::Index r = 0; r < w.coeffs().rows(); ++r)
            w.coeffs().row(r) = lu_[r].solve(u.coeffs().row(r).transpose()).transpose();
        if (!w.coeffs().allFinite())
            throw MultiplierUnderflowError("dense block solve produced non-finite values");
    } else {
        w.coeffs() = u.coeffs().cwiseQuotient(mult_);
    }
    return w;
}

SpectralField apply_linear(const ModelOperator& mo, Complex eps, const SpectralField& u) {
    return LinearSolver(mo, eps).apply(u);
}

SpectralField invert_linear(const ModelOperator& mo, Complex eps, const SpectralField& u) {
    return LinearSolver(mo, eps).invert(u);
}

namespace {

// Quartic-in-tau squared modulus of the multiplier along the continuum
// relaxation, as coefficient arrays c[0..4].
std::array<double, 5> gamma_poly(const ModelOperator& mo, Complex eps, int n) {
    const double xi = eps.real(), eta = eps.imag();
    const double lam = mo.L->lambda[n];
    std::array<double, 5> c{};
    switch (mo.variant) {
        case Variant::A: {
            // xi^2 (lam - tau^2)^2 + (eta (lam - tau^2) + tau)^2
            c[4] = xi * xi + eta * eta;
            c[3] = -2.0 * eta;
            c[2] = -2.0 * lam * xi * xi + 1.0 - 2.0 * eta * eta * lam;
            c[1] = 2.0 * eta * lam;
            c[0] = lam * lam * (xi * xi + eta * eta);
            break;
        }
        case Variant::APrime: {
            // xi^2 (tau^2 - lam)^2 + (eta (lam - tau^2) + tau lam_delta)^2
            const double ld = mo.basis->disc->lambda_delta()[n];
            c[4] = xi * xi + eta * eta;
            c[3] = -2.0 * eta * ld;
            c[2] = -2.0 * lam * xi * xi + ld * ld - 2.0 * eta * eta * lam;
            c[1] = 2.0 * eta * lam * ld;
            c[0] = lam * lam * (xi * xi + eta * eta);
            break;
        }
        case Variant::B:
        case Variant::BPrime: {
            // (a tau^2 + lam)^2 + (b tau^2 + tau)^2 with a + ib = -eps^2
            const Complex me2 = -eps * eps;
            const double a = me2.real(), b = me2.imag();
            c[4] = a * a + b * b;
            c[3] = 2.0 * b;
            c[2] = 2.0 * a * lam + 1.0;
            c[1] = 0.0;
            c[0] = lam * lam;
            break;
        }
    }
    return c;
}

double eval_poly(const std::array<double, 5>& c, double t) {
    return (((c[4] * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0];
}

// Real roots of the derivative polynomial via a companion matrix.
std::vector<double> stationary_points(const std::array<double, 5>& c) {
    std::vector<double> d = {c[1], 2.0 * c[2], 3.0 * c[3], 4.0 * c[4]};
    while (d.size() > 1 && std::abs(d.back()) < 1e-300) d.pop_back();
    std::vector<double> roots;
    const int deg = static_cast<int>(d.size()) - 1;
    if (deg < 1) return roots;
    MatR comp = MatR::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) {
        comp(i, deg - 1) = -d[i] / d[deg];
        if (i + 1 < deg) comp(i + 1, i) = 1.0;
    }
    Eigen::EigenSolver<MatR> es(comp);
    for (int i = 0; i < deg; ++i) {
        const Complex r = es.eigenvalues()[i];
        if (std::abs(r.imag()) < 1e-8 * (1.0 + std::abs(r.real())))
            roots.push_back(r.real());
    }
    return roots;
}

double golden_refine(const std::array<double, 5>& c, double lo, double hi) {
    const double gr = 0.61803398874989484820;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = eval_poly(c, x1), f2 = eval_poly(c, x2);
    for (int it = 0; it < 80 && (b - a) > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = eval_poly(c, x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = eval_poly(c, x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

GammaBound gamma_lower_bound(const ModelOperator& mo, Complex eps, int grid_samples) {
    require_nonzero_eps(mo.variant, eps);
    GammaBound best;
    best.value = std::numeric_limits<double>::infinity();
    const int N = mo.basis->disc->n_x();
    const double lam_max = mo.L->lambda.maxCoeff();
    for (int n = 0; n < N; ++n) {
        const auto c = gamma_poly(mo, eps, n);
        std::vector<double> cand = stationary_points(c);
        cand.push_back(0.0);
        // Guard grid over the moderate-tau region (the exact stationary points
        // already cover far-field minima, e.g. tau ~ 1/|eps| for B).
        const double T = 2.0 * std::sqrt(std::max(1.0, lam_max)) + 2.0;
        const double step = 2.0 * T / grid_samples;
        double prev2 = eval_poly(c, -T - step), prev = eval_poly(c, -T);
        for (int i = 1; i <= grid_samples; ++i) {
            const double t = -T + i * step;
            const double v = eval_poly(c, t);
            if (prev <= prev2 && prev <= v) cand.push_back(t - step);
            prev2 = prev;
            prev = v;
        }
        for (double t0 : cand) {
            const double t = golden_refine(c, t0 - step, t0 + step);
            const double v = std::min(eval_poly(c, t), eval_poly(c, t0));
            const double tt = eval_poly(c, t) <= eval_poly(c, t0) ? t : t0;
            if (v < best.value) best = {v, tt, n};
        }
    }
    if (best.value < 0.0 && best.value > -1e-12) best.value = 0.0;  // roundoff at a true zero
    return best;
}

ResonanceTable resonance_locations(const ModelOperator& mo, int k_max, int n_max) {
    ResonanceTable table;
    const auto& d = *mo.basis->disc;
    const int N = std::min(n_max, d.n_x());
    for (const auto& k : enumerate_l1_ball(mo.omega.dim(), k_max)) {
        const double tau = kTwoPi * mo.omega.dot(k);
        if (tau == 0.0) continue;
        for (int n = 0; n < N; ++n) {
            const double lam = mo.L->lambda[n];
            switch (mo.variant) {
                case Variant::A: {
                    const double den = tau * tau - lam;
                    if (std::abs(den) < 1e-12 * (tau * tau + std::abs(lam))) {
                        table.skipped.emplace_back(k, n);
                        break;
                    }
                    table.found.push_back({Complex(0.0, tau / den), k, n});
                    break;
                }
                case Variant::APrime: {
                    const double ld = d.lambda_delta()[n];
                    const double den = tau * tau - lam;
                    if (std::abs(den) < 1e-12 * (tau * tau + std::abs(lam))) {
                        table.skipped.emplace_back(k, n);
                        break;
                    }
                    table.found.push_back({Complex(0.0, -tau * ld / den), k, n});
                    break;
                }
                case Variant::B:
                case Variant::BPrime: {
                    const Complex e2 = Complex(lam, tau) / (tau * tau);
                    const Complex root = std::sqrt(e2);
                    table.found.push_back({root, k, n});
                    table.found.push_back({-root, k, n});
                    break;
                }
            }
        }
    }
    std::sort(table.found.begin(), table.found.end(), [](const Resonance& a, const Resonance& b) {
        const double ma = std::abs(a.eps), mb = std::abs(b.eps);
        if (ma != mb) return ma < mb;
        if (a.eps.real() != b.eps.real()) return a.eps.real() < b.eps.real();
        return a.eps.imag() < b.eps.imag();
    });
    return table;
}

double nearest_resonance_distance(const ResonanceTable& table, Complex eps) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : table.found) best = std::min(best, std::abs(eps - r.eps));
    return best;
}

}  // namespace qpresp
