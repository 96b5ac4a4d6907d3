#include "qpresp/frequency.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace qpresp {

std::string to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::Dirichlet: return "dirichlet";
        case BoundaryCondition::Neumann: return "neumann";
        case BoundaryCondition::Periodic: return "periodic";
    }
    return "?";
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::A: return "A";
        case Variant::APrime: return "Aprime";
        case Variant::B: return "B";
        case Variant::BPrime: return "Bprime";
    }
    return "?";
}

Frequency::Frequency(VecR omega) : omega_(std::move(omega)) {
    if (omega_.size() == 0) throw ConfigError("frequency vector is empty");
}

Frequency Frequency::unchecked(VecR omega) { return Frequency(std::move(omega)); }

Frequency Frequency::checked(VecR omega, int k_check, double resonance_tol) {
    Frequency f(std::move(omega));
    auto scan = f.scan_divisors(k_check);
    if (scan.min_abs < resonance_tol) {
        std::ostringstream os;
        os << "frequency admits |omega.k| = " << scan.min_abs << " < " << resonance_tol
           << " at k = (";
        for (int i = 0; i < scan.k.size(); ++i) os << (i ? "," : "") << scan.k[i];
        os << ")";
        throw HypothesisError("H3", os.str());
    }
    return f;
}

double Frequency::dot(const VecI& k) const {
    long double acc = 0.0L;
    for (int i = 0; i < omega_.size(); ++i)
        acc += static_cast<long double>(omega_[i]) * static_cast<long double>(k[i]);
    return static_cast<double>(acc);
}

Frequency::DivisorScan Frequency::scan_divisors(int k_max) const {
    DivisorScan best{std::numeric_limits<double>::infinity(), VecI()};
    for (const auto& k : enumerate_l1_ball(dim(), k_max)) {
        double v = std::abs(dot(k));
        if (v < best.min_abs) {
            best.min_abs = v;
            best.k = k;
        }
    }
    return best;
}

std::vector<VecI> enumerate_l1_ball(int d, int k_max) {
    std::vector<VecI> out;
    VecI k = VecI::Zero(d);
    std::function<void(int, int)> rec = [&](int pos, int budget) {
        if (pos == d) {
            if (k.cwiseAbs().sum() > 0) out.push_back(k);
            return;
        }
        for (int v = -budget; v <= budget; ++v) {
            k[pos] = v;
            rec(pos + 1, budget - std::abs(v));
        }
        k[pos] = 0;
    };
    rec(0, k_max);
    return out;
}

}  // namespace qpresp
