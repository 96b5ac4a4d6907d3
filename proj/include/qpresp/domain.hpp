#pragma once

#include <sstream>

#include "qpresp/common.hpp"

namespace qpresp {

// Complex epsilon domains on which the linear multipliers stay bounded away
// from zero.
//
//  Parabolic (models A/A'):  xi > B eta^2  and  sigma < |eps| < 2 sigma,
//                            eps = xi + i eta.
//  Sector    (models B/B'):  Re(-eps^2) >= delta, or eps real with
//                            delta < |xi| < 2 delta.
struct DomainSpec {
    enum class Kind { Parabolic, Sector };
    Kind kind = Kind::Parabolic;
    double sigma = 0.05;
    double b = 100.0;
    double delta = 0.05;

    bool contains(Complex eps) const {
        const double xi = eps.real(), eta = eps.imag();
        if (kind == Kind::Parabolic) {
            const double r = std::abs(eps);
            return xi > b * eta * eta && r > sigma && r < 2.0 * sigma;
        }
        const double re_m_eps2 = -(xi * xi - eta * eta);
        if (re_m_eps2 >= delta) return true;
        return eta == 0.0 && std::abs(xi) > delta && std::abs(xi) < 2.0 * delta;
    }

    // Union over sigma of the parabolic domains (the annulus constraint
    // dropped); meaningful for Parabolic only.  Sector falls back to contains.
    bool contains_union(Complex eps) const {
        if (kind != Kind::Parabolic) return contains(eps);
        const double xi = eps.real(), eta = eps.imag();
        return xi > b * eta * eta && std::abs(eps) > 0.0;
    }

    std::string describe() const {
        std::ostringstream os;
        if (kind == Kind::Parabolic)
            os << "parabolic(sigma=" << sigma << ", B=" << b << ")";
        else
            os << "sector(delta=" << delta << ")";
        return os.str();
    }
};

}  // namespace qpresp
