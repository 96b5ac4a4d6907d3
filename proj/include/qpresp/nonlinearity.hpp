#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qpresp/common.hpp"

namespace qpresp {

// Pointwise nonlinearity h(u, x) together with its u-derivatives of any order
// the expansion machinery asks for.
//
//  Polynomial     h(u,x) = sum_p a_p(x) u^p        (derivatives exact, all orders)
//  MemsCapacitor  h(u)   = gamma / (1+u)^2         (derivatives exact, all orders;
//                                                   guarded pole at u = -1)
//  Custom         caller-supplied derivative stack (orders 0..provided)
class Nonlinearity {
public:
    enum class Kind { Polynomial, MemsCapacitor, Custom };
    using PointFn = std::function<Complex(Complex u, double x)>;

    static Nonlinearity polynomial(std::vector<double> coeffs);
    static Nonlinearity polynomial_profiles(std::vector<std::function<double(double)>> coeffs,
                                            bool h0_zero);
    static Nonlinearity mems(double gamma, double pole_guard = 1e-6);
    // derivs[p] evaluates the p-th u-derivative of h; at least derivs[0..2]
    // must be supplied for the fixed-point machinery.
    static Nonlinearity custom(std::vector<PointFn> derivs, bool h0_zero,
                               bool x_independent);

    Kind kind() const { return kind_; }
    // Largest derivative order eval() supports; -1 means unlimited.
    int max_order() const;
    // p-th u-derivative of h at (u, x).  Throws PoleProximityError for
    // MemsCapacitor when |1+u| <= pole_guard, Error for unsupported order.
    Complex eval(int p, Complex u, double x) const;

    // h(0,x) == 0 for all x (required by Dirichlet boundary conditions and by
    // the model-B zeroth order).
    bool h0_zero() const { return h0_zero_; }
    // x-independent (the Neumann compatibility condition in one space dim).
    bool x_independent() const { return x_independent_; }
    double pole_guard() const { return pole_guard_; }

    std::string describe() const;

private:
    Nonlinearity() = default;
    Kind kind_ = Kind::Polynomial;
    std::vector<std::function<double(double)>> poly_;  // a_p(x)
    double gamma_ = 0.0;
    double pole_guard_ = 1e-6;
    std::vector<PointFn> custom_;
    bool h0_zero_ = false;
    bool x_independent_ = false;
    std::string describe_;
};

}  // namespace qpresp
