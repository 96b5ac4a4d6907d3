#include "qpresp/norms.hpp"

#include <cmath>
#include <sstream>

namespace qpresp {

namespace {

MatR weights_for(const EllipticOperator& basis, const NormParams& params, bool clamp) {
    const auto& d = *basis.disc;
    params.validate(d.d());
    if (!clamp && basis.lambda[0] <= 0.0) {
        std::ostringstream os;
        os << "norm weights need a positive spectrum; smallest eigenvalue is "
           << basis.lambda[0];
        throw HypothesisError("H2", os.str());
    }
    const double rho = params.rho;
    MatR w(d.n_theta_modes(), d.n_x());
    for (int r = 0; r < d.n_theta_modes(); ++r) {
        const VecI k = d.k_of(r);
        const int k1 = k.cwiseAbs().sum();
        double theta_w;
        if (k1 == 0) {
            // 1 / B(0, rho) = (4 pi rho)^d
            theta_w = std::pow(2.0 * kTwoPi * rho, d.d());
        } else {
            double b = 1.0;
            for (int i = 0; i < k.size(); ++i)
                b *= (k[i] == 0) ? 1.0 / (2.0 * kTwoPi * rho)
                                 : 2.0 * kTwoPi * std::abs(k[i]);
            const double sym = kTwoPi * k1;  // 2 pi |k|
            theta_w = std::exp(2.0 * kTwoPi * k1 * rho) / b *
                      std::pow(sym * sym + 1.0, params.j);
        }
        for (int n = 0; n < d.n_x(); ++n) {
            const double lam = clamp ? std::max(basis.lambda[n], 1.0) : basis.lambda[n];
            w(r, n) = theta_w * std::pow(lam, params.m);
        }
    }
    return w;
}

}  // namespace

MatR norm_weights(const EllipticOperator& basis, const NormParams& params) {
    return weights_for(basis, params, false);
}

MatR sampling_weights(const EllipticOperator& basis, const NormParams& params) {
    return weights_for(basis, params, true);
}

double norm(const SpectralField& u, const NormParams& params) {
    MatR w = norm_weights(*u.basis(), params);
    double acc = 0.0;
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            acc += w(r, c) * std::norm(u.coeffs()(r, c));
    return std::sqrt(acc);
}

}  // namespace qpresp
