#pragma once

#include <optional>
#include <vector>

#include "qpresp/common.hpp"

namespace qpresp {

// Frequency vector omega of the quasi-periodic forcing.  The angle variable
// lives on the d-torus and omega.k divisors drive everything downstream, so
// construction checks that no small integer combination annihilates omega.
class Frequency {
public:
    // Throws HypothesisError("H3") if some 0 < |k|_1 <= k_check has
    // |omega . k| < resonance_tol.
    static Frequency checked(VecR omega, int k_check = 64, double resonance_tol = 1e-12);
    // No admissibility check; for frequencies that are deliberately near-resonant.
    static Frequency unchecked(VecR omega);

    int dim() const { return static_cast<int>(omega_.size()); }
    const VecR& values() const { return omega_; }

    // omega . k accumulated in extended precision (matters for near-resonant omega).
    double dot(const VecI& k) const;

    // Smallest |omega . k| over 0 < |k|_1 <= k_max, with its attaining k.
    struct DivisorScan {
        double min_abs;
        VecI k;
    };
    DivisorScan scan_divisors(int k_max) const;

private:
    explicit Frequency(VecR omega);
    VecR omega_;
};

// Enumerates all integer vectors with 0 < |k|_1 <= k_max in d dimensions,
// in a fixed deterministic order.
std::vector<VecI> enumerate_l1_ball(int d, int k_max);

}  // namespace qpresp
