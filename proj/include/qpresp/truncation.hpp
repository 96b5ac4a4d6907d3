#pragma once

#include "qpresp/common.hpp"

namespace qpresp {

// Band limits of the working representation: |k_i| <= k_theta per torus
// dimension, n_x spatial modes, and the oversampling factor of the collocation
// grids used for products (>= 2 keeps cubic products alias-free in band).
struct Truncation {
    int k_theta = 8;
    int n_x = 8;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int oversample = 2;

    void validate() const {
        if (k_theta < 1) throw ConfigError("k_theta must be >= 1");
        if (n_x < 1) throw ConfigError("n_x must be >= 1");
        if (oversample < 2) throw ConfigError("oversample must be >= 2");
    }
};

// Parameters (rho, j, m) of the weighted analytic norm.  rho is the width of
// the analyticity strip in theta; j and m are even Sobolev exponents in theta
// and x.  The algebra property needs j > d and m > 1/2 (so m >= 2 here).
struct NormParams {
    double rho = 0.1;
    int j = 2;
    int m = 2;

    void validate(int d) const {
        if (!(rho > 0)) throw ConfigError("norm rho must be > 0");
        if (j < 0 || j % 2 != 0) throw ConfigError("norm j must be even and >= 0");
        if (m < 0 || m % 2 != 0) throw ConfigError("norm m must be even and >= 0");
        if (j <= d) throw ConfigError("norm j must exceed the torus dimension d");
        if (m < 2) throw ConfigError("norm m must be >= 2 for the algebra property");
    }
};

}  // namespace qpresp
