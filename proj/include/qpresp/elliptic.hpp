#pragma once

#include <memory>

#include "qpresp/discretization.hpp"
#include "qpresp/nonlinearity.hpp"

namespace qpresp {

// Self-adjoint spatial operator diagonalized over the -Delta basis.  Either
// -Delta itself (Q = I) or L = -Delta + h'(c0(x), x), whose eigenpairs come
// from a dense symmetric solve on the truncated Galerkin matrix.
struct EllipticOperator {
    DiscretizationPtr disc;
    SourceTag tag = SourceTag::MinusDelta;
    VecR lambda;            // ascending eigenvalues
    MatR q;                 // columns: eigenvectors in -Delta coordinates
    MatR matrix;            // dense Galerkin matrix in -Delta coordinates
    VecR potential_grid;    // h'(c0(x), x) samples (empty for MinusDelta)
    bool h2_ok = false;     // lambda_1 > 0

    // Spatial change of basis for one profile (columns of coefficient arrays
    // are handled by the field layer).
    VecR to_eigen_coords(const VecR& delta_coeffs) const { return q.transpose() * delta_coeffs; }
    VecR to_delta_coords(const VecR& eigen_coeffs) const { return q * eigen_coeffs; }
    Vec to_eigen_coords(const Vec& delta_coeffs) const {
        return q.transpose().cast<Complex>() * delta_coeffs;
    }
    Vec to_delta_coords(const Vec& eigen_coeffs) const {
        return q.cast<Complex>() * eigen_coeffs;
    }
};

using EllipticPtr = std::shared_ptr<const EllipticOperator>;

// The canonical -Delta operator on the discretization's basis.
EllipticPtr minus_delta_operator(DiscretizationPtr disc);

// Assembles and diagonalizes L = -Delta + h'(c0, .).  c0 is given in -Delta
// coordinates.  With require_h2 the smallest eigenvalue must be positive,
// otherwise an H2 HypothesisError is thrown; pass false to inspect rejected
// branches.
EllipticPtr build_L(DiscretizationPtr disc, const Nonlinearity& h, const VecR& c0_delta,
                    bool require_h2 = true);

}  // namespace qpresp
