#pragma once

#include <cstdint>
#include <optional>

#include "qpresp/elliptic.hpp"
#include "qpresp/frequency.hpp"
#include "qpresp/truncation.hpp"

namespace qpresp {

// Band-limited function of (theta, x): coefficients u_hat(k, n) over torus
// modes k and the spatial eigenbasis of the attached elliptic operator
// (either the -Delta basis or the diagonalized-L basis).  Rows of `coeffs`
// run over the flattened theta modes, columns over n.
class SpectralField {
public:
    SpectralField() = default;
    static SpectralField zero(EllipticPtr basis);

    const Mat& coeffs() const { return coeffs_; }
    Mat& coeffs() { return coeffs_; }
    const EllipticPtr& basis() const { return basis_; }
    const DiscretizationPtr& disc() const { return basis_->disc; }
    SourceTag basis_tag() const { return basis_->tag; }

    bool same_layout(const SpectralField& other) const { return basis_ == other.basis_; }
    void require_same_layout(const SpectralField& other) const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(Complex s);
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

    double max_abs_coeff() const;
    double max_abs_diff(const SpectralField& o) const;

    // Collocation values, shape (theta grid points x x grid points).
    Mat to_grid() const;
    static SpectralField from_grid(EllipticPtr basis, const Mat& grid);

    // k = 0 slice as a spatial coefficient vector (in the field's basis).
    Vec theta_average() const;
    void set_theta_average(const Vec& avg);
    SpectralField minus_average() const;

private:
    SpectralField(EllipticPtr basis, Mat coeffs);
    EllipticPtr basis_;
    Mat coeffs_;
};

// Pointwise product uv, truncated back to the working band.  Fields must share
// the discretization and basis.
SpectralField multiply(const SpectralField& u, const SpectralField& v);

// Composition with the nonlinearity: order-p derivative field h^(p)(base + u, x)
// where `base` is a real spatial profile in -Delta coordinates (pass empty for
// zero).  Evaluated on the oversampled grid and projected back to the band.
SpectralField compose_h(const Nonlinearity& h, int order, const SpectralField& u,
                        const VecR& base_delta = VecR());

// Solves (omega . grad_theta) w = rhs for the zero-average w.  rhs must have
// (numerically) zero theta-average; divisors |omega.k| below divisor_floor
// raise SmallDivisorError naming k.
SpectralField solve_omega_grad(const SpectralField& rhs, const Frequency& omega,
                               double divisor_floor = 1e-14);

// Applies omega . grad_theta (diagonal: multiply mode k by 2 pi i omega.k).
SpectralField apply_omega_grad(const SpectralField& u, const Frequency& omega);

// Applies the field's own elliptic operator (diagonal in its eigenbasis).
SpectralField apply_elliptic(const SpectralField& u);

// Applies a (possibly different) operator's dense Galerkin matrix to a field
// held in -Delta coordinates; used where L does not commute with -Delta.
SpectralField apply_operator(const EllipticOperator& op, const SpectralField& u);

// Builders: real forcing modes  amp * cos(2 pi k.theta) * Phi_n(x)  and the
// sin counterpart (coefficients are conjugate-symmetrized, so the field is a
// real function).  n is 1-based.
SpectralField real_cos_mode(EllipticPtr basis, const VecI& k, int n, double amp);
SpectralField real_sin_mode(EllipticPtr basis, const VecI& k, int n, double amp);

// Gaussian random field whose per-mode variance is the reciprocal of the
// sampling weight (the norm weight with eigenvalues clamped away from zero),
// so every mode contributes comparably to the norm.  Deterministic in the
// seed; works on bases with zero modes where the norm itself is undefined.
SpectralField random_field(EllipticPtr basis, const NormParams& params, std::uint64_t seed);

// Largest violation of the conjugate symmetry u_hat(-k,n) = conj(u_hat(k,n))
// (zero for fields representing real functions).
double reality_defect(const SpectralField& u);

}  // namespace qpresp
