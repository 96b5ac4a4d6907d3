#pragma once

#include <string>
#include <vector>

#include "qpresp/pipeline.hpp"

namespace qpresp {

// One epsilon sample of a domain scan.
struct ScanPoint {
    Complex eps;
    bool in_domain = false;
    bool attempted = false;
    FixedPointStatus status = FixedPointStatus::MaxIterations;
    int iterations = 0;
    double contraction = 0.0;
    double residual_raw = 0.0;       // eps-multiplied-form residual, sup
    double residual_scaled = 0.0;    // unmultiplied-equation residual, sup
    double solution_norm = 0.0;      // analytic norm of the response
    double min_abs_multiplier = 0.0;
    double resonance_distance = -1.0;  // -1 when the table was not requested
    std::string error;               // exception text, empty if none
};

struct ScanOptions {
    int threads = 1;
    bool strict = true;        // true: solve only inside the domain;
                               // false: attempt every point (exploration)
    FixedPointOptions fixed_point;
    NormParams norm;
    bool use_series_start = false;  // start from the expansion partial sum
    int start_order = -1;           // -1: full available order
    int resonance_k_max = 0;        // 0: skip resonance distances
    int resonance_n_max = 8;
};

// Solves the fixed point over a list of epsilon values; deterministic
// (each point's result depends only on its own inputs).  `series` may be
// null unless use_series_start is set.
std::vector<ScanPoint> scan_epsilon(const ModelContext& ctx,
                                    const std::vector<Complex>& eps_values,
                                    const DomainSpec& domain, const LindstedtSeries* series,
                                    const ScanOptions& opts);

std::vector<Complex> epsilon_grid_real(double lo, double hi, int count);
std::vector<Complex> epsilon_grid_box(Complex corner_lo, Complex corner_hi, int nx, int ny);

// Log-log regression of the truncated-expansion residual against |eps|:
// the eps-multiplied-form residual of the order-M partial sum should scale
// like |eps|^(M+1).  Points whose residual falls below `floor` are dropped
// (roundoff saturation) and counted.
struct ResidualOrderFit {
    std::vector<double> eps_abs;
    std::vector<double> residuals;   // raw (eps-multiplied form) sup residuals
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int expected = 0;                // series order + 1
    int skipped_underflow = 0;
    double floor = 0.0;
};
ResidualOrderFit fit_residual_order(const ModelContext& ctx, const LindstedtSeries& series,
                                    const std::vector<Complex>& eps_values,
                                    double floor = 1e-14);

// The regression core on precomputed (|eps|, residual) pairs.  Points below
// `floor` are dropped; with fewer than two usable points the fit is rejected
// (NaN slope) and every dropped point is counted in skipped_underflow.
ResidualOrderFit fit_residual_points(const std::vector<double>& eps_abs,
                                     const std::vector<double>& residuals, int expected,
                                     double floor);

// Analyticity probe: solve on a circle around `center`, compare the sample
// mean with the center solution (mean-value property) and report the decay
// of the discrete Taylor coefficients.
struct CauchyCheck {
    Complex center;
    double radius = 0.0;
    int samples = 0;
    bool domain_ok = false;          // circle and center inside the sigma-union domain
    int failures = 0;                // non-converged sample solves
    double center_defect = 0.0;      // |mean - U(center)|_sup / max(1, |U(center)|_sup)
    std::vector<double> coeff_sups;  // discrete Taylor coefficient sups, p = 0..8
};
CauchyCheck cauchy_check(const ModelContext& ctx, Complex center, double radius, int samples,
                         const DomainSpec& domain, const LindstedtSeries* series,
                         const FixedPointOptions& fp = {});

}  // namespace qpresp
