#include "qpresp/model.hpp"

#include <iomanip>
#include <sstream>

namespace qpresp {

void ModelSpec::validate() const {
    trunc.validate();
    const bool prime = variant == Variant::APrime || variant == Variant::BPrime;
    if (prime && trunc.bc != BoundaryCondition::Dirichlet)
        throw HypothesisError("H2'",
                              "models A'/B' need a strictly positive -Delta spectrum; "
                              "use Dirichlet boundary conditions");
    if (trunc.bc == BoundaryCondition::Dirichlet && !h.h0_zero())
        throw HypothesisError("BCD", "Dirichlet conditions need h(0, x) = 0; "
                                     "nonlinearity is " + h.describe());
    if (trunc.bc == BoundaryCondition::Neumann && !h.x_independent())
        throw HypothesisError("BCN", "Neumann conditions need an x-independent "
                                     "nonlinearity in one space dimension");
    if ((variant == Variant::B) && !h.h0_zero())
        throw HypothesisError("h(0)=0", "model B's zeroth order needs h(0, x) = 0");
    for (const auto& e : forcing) {
        if (e.k.size() != omega.dim())
            throw ConfigError("forcing mode k has wrong dimension");
        if (e.k.cwiseAbs().maxCoeff() > trunc.k_theta)
            throw ConfigError("forcing mode k outside the truncation band");
        if (e.n < 1 || e.n > trunc.n_x)
            throw ConfigError("forcing spatial mode outside the truncation band");
    }
}

SpectralField ModelSpec::build_forcing(const EllipticPtr& delta_basis) const {
    SpectralField f = SpectralField::zero(delta_basis);
    const auto& d = *delta_basis->disc;
    for (const auto& e : forcing) {
        const int r = d.flat_of(e.k);
        const int rc = d.flat_of((-e.k.array()).matrix().eval());
        f.coeffs()(r, e.n - 1) += e.value;
        f.coeffs()(rc, e.n - 1) += std::conj(e.value);
    }
    return f;
}

std::string ModelSpec::canonical_string() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "variant=" << to_string(variant) << ";bc=" << to_string(trunc.bc)
       << ";K=" << trunc.k_theta << ";N=" << trunc.n_x << ";os=" << trunc.oversample
       << ";omega=";
    for (int i = 0; i < omega.dim(); ++i) os << (i ? "," : "") << omega.values()[i];
    os << ";h=" << h.describe() << ";f=";
    for (const auto& e : forcing) {
        os << "(";
        for (int i = 0; i < e.k.size(); ++i) os << e.k[i] << ",";
        os << e.n << "," << e.value.real() << "," << e.value.imag() << ")";
    }
    return os.str();
}

std::uint64_t ModelSpec::hash() const {
    // FNV-1a over the canonical string.
    std::uint64_t h64 = 1469598103934665603ull;
    for (unsigned char c : canonical_string()) {
        h64 ^= c;
        h64 *= 1099511628211ull;
    }
    return h64;
}

}  // namespace qpresp
