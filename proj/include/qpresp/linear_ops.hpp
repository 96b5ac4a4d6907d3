#pragma once

#include <vector>

#include "qpresp/model.hpp"

namespace qpresp {

// The linear part of each model, acting diagonally over theta modes:
//
//   A :  -tau^2 + i tau / eps            + lambda_n          tau = 2 pi omega.k
//   A':  -tau^2 - i tau lambda_delta_n / eps + lambda_n      (dense per-k block
//                                                             when L and -Delta
//                                                             do not commute)
//   B :  -eps^2 tau^2 + i tau + lambda_n
//   B':  -eps^2 tau^2 + i tau + lambda_delta_n
//
// `basis` is the working eigenbasis of the fields (L for A/B, -Delta for
// A'/B'); `L` is the elliptic operator entering the model (distinct from the
// basis only for A', where the solve is a dense block per theta mode).
struct ModelOperator {
    Variant variant = Variant::A;
    Frequency omega = Frequency::unchecked((VecR(1) << 1.0).finished());
    EllipticPtr basis;
    EllipticPtr L;
    double multiplier_floor = 1e-12;
};

// Scalar multiplier for mode (tau = 2 pi omega.k, n); exact for A/B/B' and for
// A' whenever h'(c0,.) is constant (commuting case), a positional diagnostic
// otherwise.
Complex multiplier(const ModelOperator& mo, Complex eps, double tau, int n);
Complex multiplier(const ModelOperator& mo, Complex eps, const VecI& k, int n);

// Pre-factorized linear solve at one eps; reusable across Picard iterations.
class LinearSolver {
public:
    LinearSolver(const ModelOperator& mo, Complex eps);

    SpectralField apply(const SpectralField& u) const;
    // Throws MultiplierUnderflowError when some |multiplier| < multiplier_floor.
    SpectralField invert(const SpectralField& u) const;

    double min_abs_multiplier() const { return min_abs_multiplier_; }

private:
    const ModelOperator& mo_;
    Complex eps_;
    Mat mult_;                                   // (T x n_x) diagonal multipliers
    double min_abs_multiplier_;
    std::vector<Eigen::PartialPivLU<Mat>> lu_;   // per theta mode (A' dense path)
    std::vector<Mat> block_;                     // dense blocks for apply (A')
    bool dense_ = false;
};

SpectralField apply_linear(const ModelOperator& mo, Complex eps, const SpectralField& u);
SpectralField invert_linear(const ModelOperator& mo, Complex eps, const SpectralField& u);

// Lower bound of |eps lambda_{n,k}|^2 (A/A') or of the squared B/B' multiplier
// modulus, minimized over the continuum relaxation tau in R and over n.  The
// minimum is located from the exact stationary points of the quartic in tau
// (companion-matrix roots) plus a guard grid, then sharpened by golden-section.
struct GammaBound {
    double value = 0.0;
    double tau = 0.0;
    int n = 0;
};
GammaBound gamma_lower_bound(const ModelOperator& mo, Complex eps, int grid_samples = 2048);

// Epsilon values annihilating a multiplier (Definition: lambda_{n,k}(eps*) = 0).
// For A/A' these are purely imaginary; for B/B' both square roots are listed.
// Pairs with tau^2 == lambda_n (A) have no finite resonance and are skipped.
struct Resonance {
    Complex eps;
    VecI k;
    int n = 0;  // 0-based
};
struct ResonanceTable {
    std::vector<Resonance> found;
    std::vector<std::pair<VecI, int>> skipped;  // degenerate (k, n) pairs
};
ResonanceTable resonance_locations(const ModelOperator& mo, int k_max, int n_max);

double nearest_resonance_distance(const ResonanceTable& table, Complex eps);

}  // namespace qpresp
