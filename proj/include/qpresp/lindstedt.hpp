#pragma once

#include <vector>

#include "qpresp/linear_ops.hpp"

namespace qpresp {

// How many expansion orders the frequency supports at analyticity width rho:
//   sup_{0 < |k|_1 <= K} |k|_1^{-1} ln(1/|omega.k|)  (clipped below at zero),
// max_order = floor(2 pi rho / sup); unbounded when the sup clips to zero.
struct NonresonanceDiagnostic {
    double sup = 0.0;
    VecI k;                  // attaining mode (empty when clipped)
    bool unbounded = false;
    int max_order = 0;
};
NonresonanceDiagnostic nonresonance_order(const Frequency& omega, int k_max, double rho);

struct LindstedtOptions {
    int order = 8;                     // highest eps power M
    double divisor_floor = 1e-14;      // omega.k gate for the order solves
    int potential_max_iterations = 200;  // model-B theta-dependent linear solves
    double potential_tolerance = 1e-14;
};

// Truncated response expansion U(eps) = sum_N eps^N U_N.  Models A/A' expand
// around the profile c0 and start at order 1 (terms[0] is the zero field);
// models B/B' carry the zeroth-order field in terms[0].
struct LindstedtSeries {
    Variant variant = Variant::A;
    std::vector<SpectralField> terms;
    VecR c0;                           // A/A' profile (-Delta coords), else empty
    std::vector<double> order_residuals;  // independent per-order defect, sup-coeff
    std::uint64_t model_hash = 0;

    int order() const { return static_cast<int>(terms.size()) - 1; }
    // Partial sum through min(order_cap, order()); order_cap < 0 means all.
    SpectralField evaluate(Complex eps, int order_cap = -1) const;
};

// Runs the order-by-order construction.  `f` is the forcing in the model's
// working basis; `c0_delta` is the A/A' profile (ignored for B/B'); `u0` is
// the B/B' zeroth-order field (ignored for A/A').  Averages of the A/A'
// terms are fixed by the next order's solvability condition; the top-order
// average stays zero.
LindstedtSeries lindstedt_expand(const ModelOperator& mo, const SpectralField& f,
                                 const Nonlinearity& h, const VecR& c0_delta,
                                 const SpectralField& u0, const LindstedtOptions& opts = {});

}  // namespace qpresp
