#pragma once

#include <vector>

#include "qpresp/field.hpp"

namespace qpresp {

// ---------------------------------------------------------------------------
// Models A / A': theta-independent profile equation
//
//     -c0'' + h(c0(x), x) = <f>(x)
//
// Galerkin-projected on the spatial band and solved by damped Newton.
// ---------------------------------------------------------------------------

struct NewtonOptions {
    int max_iterations = 60;
    double tolerance = 1e-12;   // relative to max(1, |<f>|_2)
    int max_halvings = 40;
};

struct ZerothProfile {
    VecR c0;                 // -Delta-basis coefficients
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;   // l2 norm of the projected residual
};

ZerothProfile solve_c0(const DiscretizationPtr& disc, const Nonlinearity& h,
                       const VecR& favg_delta, const VecR& start_delta,
                       const NewtonOptions& opts = {});

// One Newton basin: the converged profile and the linearization spectrum.
struct ZerothBranch {
    ZerothProfile profile;
    double lambda1 = 0.0;    // smallest eigenvalue of -Delta + h'(c0, .)
    bool h2_ok = false;
};

struct MultistartOptions {
    NewtonOptions newton;
    std::vector<double> constant_starts = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    int random_starts = 8;
    double random_amplitude = 1.0;
    std::uint64_t seed = 1234;
    double dedup_tol = 1e-8;
};

// Runs Newton from constant and random profiles, deduplicates the converged
// solutions and reports each with its H2 verdict, sorted by profile norm.
std::vector<ZerothBranch> multistart_c0(const DiscretizationPtr& disc, const Nonlinearity& h,
                                        const VecR& favg_delta,
                                        const MultistartOptions& opts = {});

// ---------------------------------------------------------------------------
// Model B: zeroth order is the full hull equation at eps = 0,
//
//     (omega.grad) U0 + L_B U0 = f - [h(U0, x) - h'(0, x) U0],
//
// solved by Picard iteration with the diagonal inversion of
// Gamma = omega.grad + L_B in the L_B eigenbasis (|multiplier| >= lambda_1).
// ---------------------------------------------------------------------------

enum class IterationStatus { Converged, MaxIterations, BallExit };

struct ZerothField {
    SpectralField u0;
    IterationStatus status = IterationStatus::MaxIterations;
    int iterations = 0;
    double last_step = 0.0;  // max-abs coefficient change of the final update
};

struct PicardZeroOptions {
    int max_iterations = 400;
    double tolerance = 5e-15;   // relative to max(1, max-abs of f)
    double ball_radius = 1e6;   // max-abs coefficient guard
};

// f must be held in the L_B eigenbasis (basis tag LOperator built from the
// zero profile); h needs h(0, x) = 0.
ZerothField solve_U0_modelB(const SpectralField& f, const Nonlinearity& h,
                            const Frequency& omega, const PicardZeroOptions& opts = {});

// Model B' zeroth order is linear: per-mode division of the -Delta-basis
// forcing by 2 pi i omega.k + lambda_delta_n (never smaller than lambda_1 > 0).
SpectralField solve_U0_modelBprime(const SpectralField& f, const Frequency& omega);

}  // namespace qpresp
