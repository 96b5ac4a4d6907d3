#include "qpresp/field.hpp"

#include <random>
#include <sstream>

#include "qpresp/norms.hpp"

namespace qpresp {

SpectralField::SpectralField(EllipticPtr basis, Mat coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {}

SpectralField SpectralField::zero(EllipticPtr basis) {
    Mat c = Mat::Zero(basis->disc->n_theta_modes(), basis->disc->n_x());
    return SpectralField(std::move(basis), std::move(c));
}

void SpectralField::require_same_layout(const SpectralField& other) const {
    if (!same_layout(other))
        throw Error("fields do not share a discretization/basis; convert explicitly");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_layout(o);
    coeffs_ += o.coeffs_;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_layout(o);
    coeffs_ -= o.coeffs_;
    return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
    coeffs_ *= s;
    return *this;
}

double SpectralField::max_abs_coeff() const { return coeffs_.cwiseAbs().maxCoeff(); }

double SpectralField::max_abs_diff(const SpectralField& o) const {
    require_same_layout(o);
    return (coeffs_ - o.coeffs_).cwiseAbs().maxCoeff();
}

Mat SpectralField::to_grid() const {
    const auto& d = *disc();
    if (basis_->tag == SourceTag::MinusDelta) return d.coeffs_to_grid(coeffs_);
    // L-basis: rotate spatial columns to -Delta coordinates first.
    return d.coeffs_to_grid(coeffs_ * basis_->q.transpose().cast<Complex>());
}

SpectralField SpectralField::from_grid(EllipticPtr basis, const Mat& grid) {
    Mat c = basis->disc->grid_to_coeffs(grid);
    if (basis->tag != SourceTag::MinusDelta) c = c * basis->q.cast<Complex>();
    return SpectralField(std::move(basis), std::move(c));
}

Vec SpectralField::theta_average() const {
    return coeffs_.row(disc()->zero_mode()).transpose();
}

void SpectralField::set_theta_average(const Vec& avg) {
    coeffs_.row(disc()->zero_mode()) = avg.transpose();
}

SpectralField SpectralField::minus_average() const {
    SpectralField out = *this;
    out.coeffs_.row(disc()->zero_mode()).setZero();
    return out;
}

SpectralField multiply(const SpectralField& u, const SpectralField& v) {
    u.require_same_layout(v);
    Mat g = u.to_grid().cwiseProduct(v.to_grid());
    return SpectralField::from_grid(u.basis(), g);
}

SpectralField compose_h(const Nonlinearity& h, int order, const SpectralField& u,
                        const VecR& base_delta) {
    const auto& d = *u.disc();
    const auto& x = d.x_tables();
    Mat g = u.to_grid();
    VecR base = base_delta.size() ? d.profile_to_grid(base_delta)
                                  : VecR::Zero(x.grid_x.size());
    for (Eigen::Index q = 0; q < g.cols(); ++q) {
        const double xq = x.grid_x[q];
        const double bq = base[q];
        for (Eigen::Index r = 0; r < g.rows(); ++r)
            g(r, q) = h.eval(order, bq + g(r, q), xq);
    }
    return SpectralField::from_grid(u.basis(), g);
}

SpectralField solve_omega_grad(const SpectralField& rhs, const Frequency& omega,
                               double divisor_floor) {
    const auto& d = *rhs.disc();
    const double scale = std::max(1.0, rhs.max_abs_coeff());
    const double avg = rhs.coeffs().row(d.zero_mode()).cwiseAbs().maxCoeff();
    if (avg > 1e-14 * scale) {
        std::ostringstream os;
        os << "rhs has nonzero theta-average (max |coeff| " << avg << " > 1e-14 * " << scale
           << "); the equation is only solvable on zero-average data";
        throw Error(os.str());
    }
    SpectralField w = rhs;
    for (int r = 0; r < d.n_theta_modes(); ++r) {
        if (r == d.zero_mode()) {
            w.coeffs().row(r).setZero();
            continue;
        }
        const double dot = omega.dot(d.k_of(r));
        if (std::abs(dot) < divisor_floor) {
            std::ostringstream os;
            os << "|omega.k| = " << std::abs(dot) << " < floor " << divisor_floor << " at k = (";
            VecI k = d.k_of(r);
            for (int i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
            os << ")";
            throw SmallDivisorError(os.str());
        }
        w.coeffs().row(r) /= Complex(0.0, kTwoPi * dot);
    }
    return w;
}

SpectralField apply_omega_grad(const SpectralField& u, const Frequency& omega) {
    const auto& d = *u.disc();
    SpectralField w = u;
    for (int r = 0; r < d.n_theta_modes(); ++r)
        w.coeffs().row(r) *= Complex(0.0, kTwoPi * omega.dot(d.k_of(r)));
    return w;
}

SpectralField apply_elliptic(const SpectralField& u) {
    // Coefficients live in the operator's own eigencoordinates, so this is
    // always a diagonal multiply.
    SpectralField w = u;
    w.coeffs() = u.coeffs() * u.basis()->lambda.asDiagonal();
    return w;
}

SpectralField apply_operator(const EllipticOperator& op, const SpectralField& u) {
    if (u.basis_tag() != SourceTag::MinusDelta || op.disc != u.disc())
        throw Error("apply_operator expects a -Delta-basis field on the operator's grid");
    SpectralField w = u;
    w.coeffs() = u.coeffs() * op.matrix.transpose().cast<Complex>();
    return w;
}

namespace {
SpectralField real_mode(EllipticPtr basis, const VecI& k, int n, Complex half_amp) {
    if (n < 1 || n > basis->disc->n_x()) throw ConfigError("spatial mode index out of range");
    SpectralField f = SpectralField::zero(basis);
    const int r = basis->disc->flat_of(k);
    const int rc = basis->disc->flat_of((-k.array()).matrix().eval());
    f.coeffs()(r, n - 1) += half_amp;
    f.coeffs()(rc, n - 1) += std::conj(half_amp);
    return f;
}
}  // namespace

SpectralField real_cos_mode(EllipticPtr basis, const VecI& k, int n, double amp) {
    return real_mode(std::move(basis), k, n, Complex(amp / 2.0, 0.0));
}

SpectralField real_sin_mode(EllipticPtr basis, const VecI& k, int n, double amp) {
    // sin = (e^{i.} - e^{-i.}) / (2i): coefficient at +k is amp/(2i).
    return real_mode(std::move(basis), k, n, Complex(0.0, -amp / 2.0));
}

SpectralField random_field(EllipticPtr basis, const NormParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    SpectralField f = SpectralField::zero(basis);
    MatR w = sampling_weights(*basis, params);
    for (Eigen::Index r = 0; r < f.coeffs().rows(); ++r)
        for (Eigen::Index c = 0; c < f.coeffs().cols(); ++c)
            f.coeffs()(r, c) = Complex(g(rng), g(rng)) / std::sqrt(w(r, c));
    return f;
}

double reality_defect(const SpectralField& u) {
    const auto& d = *u.disc();
    double worst = 0.0;
    for (int r = 0; r < d.n_theta_modes(); ++r) {
        const int rc = d.conjugate_mode(r);
        for (int n = 0; n < d.n_x(); ++n)
            worst = std::max(worst,
                             std::abs(u.coeffs()(rc, n) - std::conj(u.coeffs()(r, n))));
    }
    return worst;
}

}  // namespace qpresp
