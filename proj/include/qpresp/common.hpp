#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qpresp {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using Vec = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using VecI = Eigen::VectorXi;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class BoundaryCondition { Dirichlet, Neumann, Periodic };
enum class Variant { A, APrime, B, BPrime };
enum class SourceTag { MinusDelta, LOperator };

std::string to_string(BoundaryCondition bc);
std::string to_string(Variant v);

// Base class for all loud failures.  Subtypes let callers catch a specific
// failure mode (small divisors, vanishing multipliers) without string matching.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A standing hypothesis (H1, H2, H2', BCD, BCN, ...) fails on the given data.
class HypothesisError : public Error {
public:
    HypothesisError(const std::string& hypothesis, const std::string& detail)
        : Error(hypothesis + " violated: " + detail), hypothesis_(hypothesis) {}
    const std::string& hypothesis() const { return hypothesis_; }
private:
    std::string hypothesis_;
};

// |omega . k| fell below the configured floor while dividing.
class SmallDivisorError : public Error {
public:
    SmallDivisorError(const std::string& detail) : Error("small divisor: " + detail) {}
};

// A linear multiplier's modulus fell below the configured floor (resonant eps).
class MultiplierUnderflowError : public Error {
public:
    MultiplierUnderflowError(const std::string& detail)
        : Error("multiplier underflow: " + detail) {}
};

// Sampled values entered the singular region of the nonlinearity.
class PoleProximityError : public Error {
public:
    PoleProximityError(const std::string& detail) : Error("pole proximity: " + detail) {}
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& detail) : Error("config: " + detail) {}
};

}  // namespace qpresp
