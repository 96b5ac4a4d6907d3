#include "qpresp/discretization.hpp"

#include <cmath>

namespace qpresp {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
}

BasisTables basis_tables(BoundaryCondition bc, int n_x, int oversample) {
    if (n_x < 1) throw ConfigError("n_x must be >= 1");
    if (oversample < 2) throw ConfigError("oversample must be >= 2");
    BasisTables t;
    // Grid sized so that products up to cubic degree project alias-free onto
    // the working band (the +2 margin removes the boundary-degree tie).
    const int ng = oversample * n_x + 2;
    switch (bc) {
        case BoundaryCondition::Dirichlet: {
            // Phi_n = sqrt(2) sin(pi n x), n = 1..n_x, on interior points of a
            // uniform grid; the discrete sine orthogonality is exact.
            const int pts = ng - 1;
            t.lambda_delta.resize(n_x);
            t.phi.resize(pts, n_x);
            t.grid_x.resize(pts);
            t.weights = VecR::Constant(pts, 1.0 / ng);
            for (int i = 0; i < pts; ++i) t.grid_x[i] = double(i + 1) / ng;
            for (int n = 1; n <= n_x; ++n) {
                t.lambda_delta[n - 1] = kPi * kPi * n * n;
                for (int i = 0; i < pts; ++i)
                    t.phi(i, n - 1) = std::sqrt(2.0) * std::sin(kPi * n * t.grid_x[i]);
            }
            break;
        }
        case BoundaryCondition::Neumann: {
            // Phi_0 = 1, Phi_n = sqrt(2) cos(pi n x), n = 0..n_x-1, trapezoid
            // weights (half at both endpoints) make the family orthonormal.
            const int pts = ng + 1;
            t.lambda_delta.resize(n_x);
            t.phi.resize(pts, n_x);
            t.grid_x.resize(pts);
            t.weights = VecR::Constant(pts, 1.0 / ng);
            t.weights[0] *= 0.5;
            t.weights[pts - 1] *= 0.5;
            for (int i = 0; i < pts; ++i) t.grid_x[i] = double(i) / ng;
            for (int n = 0; n < n_x; ++n) {
                t.lambda_delta[n] = kPi * kPi * n * n;
                double amp = (n == 0) ? 1.0 : std::sqrt(2.0);
                for (int i = 0; i < pts; ++i)
                    t.phi(i, n) = amp * std::cos(kPi * n * t.grid_x[i]);
            }
            break;
        }
        case BoundaryCondition::Periodic: {
            // 1, sqrt(2) cos(2 pi m x), sqrt(2) sin(2 pi m x), ... on the unit
            // circle, uniform grid, plain DFT orthogonality.
            const int pts = ng;
            t.lambda_delta.resize(n_x);
            t.phi.resize(pts, n_x);
            t.grid_x.resize(pts);
            t.weights = VecR::Constant(pts, 1.0 / ng);
            for (int i = 0; i < pts; ++i) t.grid_x[i] = double(i) / ng;
            for (int n = 0; n < n_x; ++n) {
                int m = (n + 1) / 2;
                t.lambda_delta[n] = 4.0 * kPi * kPi * m * m;
                for (int i = 0; i < pts; ++i) {
                    double ph = kTwoPi * m * t.grid_x[i];
                    if (n == 0)
                        t.phi(i, n) = 1.0;
                    else if (n % 2 == 1)
                        t.phi(i, n) = std::sqrt(2.0) * std::cos(ph);
                    else
                        t.phi(i, n) = std::sqrt(2.0) * std::sin(ph);
                }
            }
            int max_m = n_x / 2;
            if (2 * max_m >= pts) throw ConfigError("n_x exceeds the periodic grid resolution");
            break;
        }
    }
    return t;
}

Discretization::Discretization(int d, Truncation trunc) : d_(d), trunc_(trunc) {
    if (d < 1) throw ConfigError("torus dimension must be >= 1");
    trunc_.validate();
    const int K = trunc_.k_theta;
    const int w = 2 * K + 1;
    t_modes_ = 1;
    for (int i = 0; i < d; ++i) t_modes_ *= w;
    m_theta_ = trunc_.oversample * w + 2;
    theta_grid_ = 1;
    for (int i = 0; i < d; ++i) theta_grid_ *= m_theta_;

    VecI zero = VecI::Zero(d);
    x_ = basis_tables(trunc_.bc, trunc_.n_x, trunc_.oversample);

    e_fwd_.resize(m_theta_, w);
    for (int q = 0; q < m_theta_; ++q)
        for (int j = 0; j < w; ++j) {
            double ph = kTwoPi * (j - K) * q / double(m_theta_);
            e_fwd_(q, j) = Complex(std::cos(ph), std::sin(ph));
        }
    e_inv_ = e_fwd_.adjoint() / double(m_theta_);
    zero_flat_ = flat_of(zero);
}

VecI Discretization::k_of(int flat) const {
    const int K = trunc_.k_theta;
    const int w = 2 * K + 1;
    VecI k(d_);
    for (int i = d_ - 1; i >= 0; --i) {
        k[i] = flat % w - K;
        flat /= w;
    }
    return k;
}

int Discretization::flat_of(const VecI& k) const {
    const int K = trunc_.k_theta;
    const int w = 2 * K + 1;
    int flat = 0;
    for (int i = 0; i < d_; ++i) {
        int j = k[i] + K;
        if (j < 0 || j >= w) throw Error("theta mode outside the truncation band");
        flat = flat * w + j;
    }
    return flat;
}

int Discretization::conjugate_mode(int flat) const { return t_modes_ - 1 - flat; }

// Contracts every theta axis of the row index with `op`, one dimension at a
// time.  The row index is mixed-radix over theta dims, dim 0 most significant.
// Each pass contracts the leading axis and rotates the result to the least
// significant position, so after d passes all axes are transformed once and
// the original ordering is restored.
Mat Discretization::apply_theta(const Mat& in, const Mat& op) const {
    const Eigen::Index dim_in = op.cols();
    const Eigen::Index dim_out = op.rows();
    Mat cur = in;
    for (int axis = 0; axis < d_; ++axis) {
        const Eigen::Index cols = cur.cols();
        const Eigen::Index inner = cur.rows() / dim_in;
        Mat next(inner * dim_out, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            // Column-major map: blk(b, a) = cur(a*inner + b, c), a = leading axis.
            Eigen::Map<const Mat> blk(cur.col(c).data(), inner, dim_in);
            Mat out_t = (blk * op.transpose()).transpose();  // (dim_out x inner)
            // out_t's column-major data is exactly the (rest..., new_axis) layout.
            next.col(c) = Eigen::Map<const Vec>(out_t.data(), inner * dim_out);
        }
        cur = std::move(next);
    }
    return cur;
}

Mat Discretization::coeffs_to_grid(const Mat& coeffs) const {
    if (coeffs.rows() != t_modes_ || coeffs.cols() != trunc_.n_x)
        throw Error("coefficient array has wrong shape");
    Mat theta_done = apply_theta(coeffs, e_fwd_);
    return theta_done * x_.phi.transpose().cast<Complex>().eval();
}

Mat Discretization::grid_to_coeffs(const Mat& grid) const {
    if (grid.rows() != theta_grid_ || grid.cols() != x_.phi.rows())
        throw Error("grid array has wrong shape");
    Mat xdone = grid * (x_.weights.asDiagonal() * x_.phi).cast<Complex>().eval();
    return apply_theta(xdone, e_inv_);
}

VecR Discretization::profile_to_grid(const VecR& delta_coeffs) const {
    if (delta_coeffs.size() != trunc_.n_x) throw Error("profile has wrong length");
    return x_.phi * delta_coeffs;
}

Vec Discretization::profile_to_grid(const Vec& delta_coeffs) const {
    if (delta_coeffs.size() != trunc_.n_x) throw Error("profile has wrong length");
    return x_.phi.cast<Complex>() * delta_coeffs;
}

VecR Discretization::profile_from_grid_real(const VecR& grid_values) const {
    return x_.phi.transpose() * (x_.weights.asDiagonal() * grid_values);
}

DiscretizationPtr make_discretization(int d, Truncation trunc) {
    return std::make_shared<const Discretization>(d, trunc);
}

}  // namespace qpresp
