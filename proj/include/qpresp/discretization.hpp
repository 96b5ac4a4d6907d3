#pragma once

#include <memory>
#include <vector>

#include "qpresp/common.hpp"
#include "qpresp/truncation.hpp"

namespace qpresp {

// Spatial basis descriptor: L2-orthonormal eigenfunctions of -Delta on the
// unit interval (Dirichlet/Neumann) or unit circle (Periodic), sampled on the
// oversampled collocation grid together with the quadrature weights that make
// them discretely orthonormal.
struct BasisTables {
    VecR lambda_delta;   // eigenvalues of -Delta, ascending
    MatR phi;            // phi(i, n) = Phi_n(x_i), grid samples
    VecR grid_x;
    VecR weights;        // quadrature weights; phi^T diag(w) phi = I
};

BasisTables basis_tables(BoundaryCondition bc, int n_x, int oversample);

// Immutable bundle of everything the band-limited representation needs:
// theta-mode enumeration, collocation grids and exact transform matrices.
class Discretization {
public:
    Discretization(int d, Truncation trunc);

    int d() const { return d_; }
    const Truncation& trunc() const { return trunc_; }
    int n_x() const { return trunc_.n_x; }
    int k_theta() const { return trunc_.k_theta; }

    int n_theta_modes() const { return t_modes_; }     // (2K+1)^d
    int n_theta_grid() const { return theta_grid_; }    // M^d collocation points
    int theta_grid_per_dim() const { return m_theta_; }

    // Multi-index of the flattened theta mode (entries in [-K, K]).
    VecI k_of(int flat) const;
    int flat_of(const VecI& k) const;
    int zero_mode() const { return zero_flat_; }        // flat index of k = 0
    int conjugate_mode(int flat) const;                 // flat index of -k

    const BasisTables& x_tables() const { return x_; }
    const VecR& lambda_delta() const { return x_.lambda_delta; }

    // Coefficients (T x n_x, spatial columns in the -Delta basis) -> grid
    // values (M^d x M_x) and back.  Exact for band-limited content.
    Mat coeffs_to_grid(const Mat& coeffs) const;
    Mat grid_to_coeffs(const Mat& grid) const;

    // Samples an x-profile given in -Delta basis coefficients on the grid.
    VecR profile_to_grid(const VecR& delta_coeffs) const;
    Vec profile_to_grid(const Vec& delta_coeffs) const;
    VecR profile_from_grid_real(const VecR& grid_values) const;

private:
    Mat apply_theta(const Mat& in, const Mat& op) const;

    int d_;
    Truncation trunc_;
    int t_modes_;
    int m_theta_;
    int theta_grid_;
    int zero_flat_;
    BasisTables x_;
    Mat e_fwd_;   // (M x 2K+1): mode -> grid, one dimension
    Mat e_inv_;   // (2K+1 x M): grid -> mode, one dimension
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr make_discretization(int d, Truncation trunc);

}  // namespace qpresp
