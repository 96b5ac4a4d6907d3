#pragma once

#include <cstdint>
#include <vector>

#include "qpresp/linear_ops.hpp"
#include "qpresp/norms.hpp"

namespace qpresp {

enum class FixedPointStatus { Converged, MaxIterations, BallExit, MultiplierUnderflow };
const char* to_string(FixedPointStatus s);

struct FixedPointOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;   // step size relative to max(1, |U|_sup)
    double ball_radius = 1e3;   // max-abs coefficient guard
};

struct FixedPointResult {
    SpectralField u;
    FixedPointStatus status = FixedPointStatus::MaxIterations;
    int iterations = 0;
    std::vector<double> step_norms;      // max-abs coefficient step per iteration
    double contraction = 0.0;            // median of the trailing step ratios
    double min_abs_multiplier = 0.0;
};

// The model's nonlinear term as it enters the fixed-point map:
//   A/A': G(U) = h(c0+U) - h(c0) - h'(c0) U
//   B   : h(U) - h'(0, x) U
//   B'  : eps h(U)
SpectralField nonlinear_term(const ModelOperator& mo, Complex eps, const Nonlinearity& h,
                             const VecR& c0_delta, const SpectralField& u);

// Picard iteration U <- Linear^{-1}(forcing-term - nonlinear_term(U)) from the
// given start.  Never throws for underflow or divergence; the status reports
// what ended the iteration.
FixedPointResult picard_solve(const ModelOperator& mo, Complex eps, const SpectralField& f,
                              const Nonlinearity& h, const VecR& c0_delta,
                              const SpectralField& start, const FixedPointOptions& opts = {});

// Residual of the governing equation itself, evaluated mode-by-mode in
// -Delta coordinates with extended-precision accumulation.  For the friction
// models the equation is assembled in its eps-multiplied form (no 1/eps
// roundoff amplification); scaled_sup divides the raw value by |eps| to
// report the unmultiplied residual.
struct HullResidual {
    double raw_sup = 0.0;
    double scaled_sup = 0.0;
    double forcing_sup = 0.0;   // sup |f_hat|, for relative context
    double relative = 0.0;      // scaled_sup / max(1, forcing_sup)
    double norm_raw = -1.0;     // weighted-norm values when NormParams supplied
    double norm_scaled = -1.0;
};
HullResidual hull_residual(const ModelOperator& mo, Complex eps, const SpectralField& u,
                           const SpectralField& f, const Nonlinearity& h,
                           const VecR& c0_delta, const NormParams* np = nullptr);

// A-priori contraction diagnostics on a coefficient-sup ball.
struct ContractionEstimate {
    double gamma_value = 0.0;     // continuum lower bound (squared modulus)
    double inverse_bound = 0.0;   // linear-solve norm bound from gamma_value
    double grid_inverse = 0.0;    // 1 / min discrete |multiplier|
    double lipschitz = 0.0;       // nonlinear-term Lipschitz bound on the ball
    double contraction = 0.0;     // inverse_bound * lipschitz
    double ball_radius = 0.0;
};
ContractionEstimate contraction_estimate(const ModelOperator& mo, Complex eps,
                                         const Nonlinearity& h, const VecR& c0_delta,
                                         double ball_radius);

// Empirical Lipschitz constant of the fixed-point map: the max over sampled
// pairs (U, V) inside the weighted-norm ball around `center` of
// norm(T(U) - T(V)) / norm(U - V).
double contraction_pairs(const ModelOperator& mo, Complex eps, const SpectralField& f,
                         const Nonlinearity& h, const VecR& c0_delta,
                         const SpectralField& center, double radius, int n_pairs,
                         std::uint64_t seed, const NormParams& np);

}  // namespace qpresp
