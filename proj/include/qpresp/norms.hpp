#pragma once

#include "qpresp/field.hpp"

namespace qpresp {

// Squared-norm weight of each (k, n) coefficient:
//
//   k != 0:  e^{4 pi |k| rho} / B(k, rho) * ((2 pi)^2 |k|^2 + 1)^j * lambda_n^m
//   k  = 0:  lambda_n^m / B(0, rho)
//
// with |k| the l1 norm, B(k, rho) = prod_i a(k_i, rho), a(j, rho) = 4 pi |j|
// for j != 0 and 1/(4 pi rho) for j = 0.  Requires every lambda_n > 0 (the
// spectral positivity hypothesis H2); violations raise HypothesisError("H2").
MatR norm_weights(const EllipticOperator& basis, const NormParams& params);

// The same weights with eigenvalues clamped to >= 1 and no positivity gate.
// Only meant to shape sampling distributions (random_field) on bases whose
// spectrum contains zero modes; never used to evaluate the norm itself.
MatR sampling_weights(const EllipticOperator& basis, const NormParams& params);

// Weighted analytic norm sqrt( sum w(k,n) |u_hat(k,n)|^2 ).
double norm(const SpectralField& u, const NormParams& params);

}  // namespace qpresp
