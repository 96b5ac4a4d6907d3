#pragma once

#include <cstdint>

#include "qpresp/domain.hpp"
#include "qpresp/field.hpp"

namespace qpresp {

// Everything that defines one problem instance: which damped wave model,
// boundary conditions (carried by the truncation), frequency, nonlinearity
// and forcing.  Forcing entries are conjugate-symmetrized coefficients, so f
// is a real function of (theta, x).
struct ForcingEntry {
    VecI k;
    int n = 1;        // 1-based spatial mode
    Complex value;    // coefficient at +k; conj added at -k automatically
};

struct ModelSpec {
    Variant variant = Variant::A;
    Frequency omega = Frequency::unchecked((VecR(1) << 1.0).finished());
    Truncation trunc;
    Nonlinearity h = Nonlinearity::polynomial({0.0, 1.0});
    std::vector<ForcingEntry> forcing;

    // Checks the structural hypotheses:
    //  - A'/B' need Dirichlet conditions (the spatial spectrum must be
    //    strictly positive for the friction/zeroth-order multipliers),
    //  - Dirichlet needs h(0, x) = 0 (BCD),
    //  - Neumann needs an x-independent nonlinearity in one space dim (BCN),
    //  - forcing entries must lie inside the truncation band.
    void validate() const;

    // Forcing as a -Delta-basis field on the given discretization.
    SpectralField build_forcing(const EllipticPtr& delta_basis) const;

    // Canonical serialization of the defining data; hash guards series reuse
    // across model changes.
    std::string canonical_string() const;
    std::uint64_t hash() const;
};

}  // namespace qpresp
