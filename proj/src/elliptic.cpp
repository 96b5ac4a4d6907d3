#include "qpresp/elliptic.hpp"

#include <sstream>

namespace qpresp {

EllipticPtr minus_delta_operator(DiscretizationPtr disc) {
    auto op = std::make_shared<EllipticOperator>();
    op->disc = disc;
    op->tag = SourceTag::MinusDelta;
    op->lambda = disc->lambda_delta();
    op->q = MatR::Identity(disc->n_x(), disc->n_x());
    op->matrix = op->lambda.asDiagonal();
    op->h2_ok = op->lambda[0] > 0.0;
    return op;
}

EllipticPtr build_L(DiscretizationPtr disc, const Nonlinearity& h, const VecR& c0_delta,
                    bool require_h2) {
    const auto& tables = disc->x_tables();
    const Eigen::Index pts = tables.grid_x.size();
    VecR c0_grid = disc->profile_to_grid(c0_delta);

    VecR hp(pts);
    for (Eigen::Index i = 0; i < pts; ++i) {
        Complex v = h.eval(1, Complex(c0_grid[i], 0.0), tables.grid_x[i]);
        if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
            throw Error("h'(c0, x) is not real on the grid");
        hp[i] = v.real();
    }

    auto op = std::make_shared<EllipticOperator>();
    op->disc = disc;
    op->tag = SourceTag::LOperator;
    op->potential_grid = hp;
    // Galerkin matrix: diag(lambda_delta) + Phi^T diag(w h') Phi, symmetric.
    MatR pot = tables.phi.transpose() *
               (tables.weights.cwiseProduct(hp)).asDiagonal() * tables.phi;
    pot = 0.5 * (pot + pot.transpose()).eval();
    op->matrix = MatR(disc->lambda_delta().asDiagonal()) + pot;

    Eigen::SelfAdjointEigenSolver<MatR> es(op->matrix);
    if (es.info() != Eigen::Success) throw Error("eigensolver failed on L");
    op->lambda = es.eigenvalues();
    op->q = es.eigenvectors();
    op->h2_ok = op->lambda[0] > 0.0;
    if (require_h2 && !op->h2_ok) {
        std::ostringstream os;
        os << "smallest eigenvalue of L is " << op->lambda[0] << " <= 0";
        throw HypothesisError("H2", os.str());
    }
    return op;
}

}  // namespace qpresp
