#include "qpresp/nonlinearity.hpp"

#include <cmath>
#include <sstream>

namespace qpresp {

Nonlinearity Nonlinearity::polynomial(std::vector<double> coeffs) {
    std::vector<std::function<double(double)>> fns;
    bool h0 = coeffs.empty() || coeffs[0] == 0.0;
    for (double c : coeffs) fns.push_back([c](double) { return c; });
    Nonlinearity h = polynomial_profiles(std::move(fns), h0);
    std::ostringstream os;
    os << "poly";
    for (double c : coeffs) os << " " << c;
    h.describe_ = os.str();
    h.x_independent_ = true;
    return h;
}

Nonlinearity Nonlinearity::polynomial_profiles(
    std::vector<std::function<double(double)>> coeffs, bool h0_zero) {
    Nonlinearity h;
    h.kind_ = Kind::Polynomial;
    h.poly_ = std::move(coeffs);
    h.h0_zero_ = h0_zero;
    h.x_independent_ = false;
    h.describe_ = "poly(profiles)";
    return h;
}

Nonlinearity Nonlinearity::mems(double gamma, double pole_guard) {
    Nonlinearity h;
    h.kind_ = Kind::MemsCapacitor;
    h.gamma_ = gamma;
    h.pole_guard_ = pole_guard;
    h.h0_zero_ = (gamma == 0.0);
    h.x_independent_ = true;
    std::ostringstream os;
    os << "mems " << gamma;
    h.describe_ = os.str();
    return h;
}

Nonlinearity Nonlinearity::custom(std::vector<PointFn> derivs, bool h0_zero,
                                  bool x_independent) {
    if (derivs.size() < 3)
        throw ConfigError("custom nonlinearity needs derivative orders 0..2 at least");
    Nonlinearity h;
    h.kind_ = Kind::Custom;
    h.custom_ = std::move(derivs);
    h.h0_zero_ = h0_zero;
    h.x_independent_ = x_independent;
    h.describe_ = "custom";
    return h;
}

int Nonlinearity::max_order() const {
    return kind_ == Kind::Custom ? static_cast<int>(custom_.size()) - 1 : -1;
}

Complex Nonlinearity::eval(int p, Complex u, double x) const {
    switch (kind_) {
        case Kind::Polynomial: {
            // p-th derivative of sum a_q u^q: sum_{q>=p} a_q q!/(q-p)! u^{q-p},
            // evaluated by Horner on the shifted coefficients.
            const int P = static_cast<int>(poly_.size()) - 1;
            if (p > P) return 0.0;
            Complex acc = 0.0;
            for (int q = P; q >= p; --q) {
                double fall = 1.0;
                for (int r = 0; r < p; ++r) fall *= static_cast<double>(q - r);
                acc = acc * u + fall * poly_[q](x);
            }
            return acc;
        }
        case Kind::MemsCapacitor: {
            Complex w = 1.0 + u;
            if (std::abs(w) <= pole_guard_ || !std::isfinite(std::abs(w))) {
                std::ostringstream os;
                os << "|1+u| = " << std::abs(w) << " <= pole_guard " << pole_guard_
                   << " at x = " << x;
                throw PoleProximityError(os.str());
            }
            // d^p/du^p [ gamma (1+u)^-2 ] = gamma (-1)^p (p+1)! (1+u)^-(p+2)
            double fact = 1.0;
            for (int r = 2; r <= p + 1; ++r) fact *= r;
            double sign = (p % 2 == 0) ? 1.0 : -1.0;
            return gamma_ * sign * fact * std::pow(w, -(p + 2));
        }
        case Kind::Custom: {
            if (p >= static_cast<int>(custom_.size())) {
                std::ostringstream os;
                os << "custom nonlinearity supplies derivatives up to order "
                   << custom_.size() - 1 << ", order " << p << " requested";
                throw Error(os.str());
            }
            return custom_[p](u, x);
        }
    }
    throw Error("unreachable nonlinearity kind");
}

std::string Nonlinearity::describe() const { return describe_; }

}  // namespace qpresp
