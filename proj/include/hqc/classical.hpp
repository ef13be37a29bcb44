#pragma once

#include <string_view>
#include <vector>

#include "hqc/noise.hpp"

namespace hqc {

/// Potential V(X) acting on the classical particle.
struct PotentialSpec {
    enum class Kind { Free, Harmonic, Polynomial };

    Kind kind = Kind::Free;
    /// Harmonic: V = stiffness X^2 / 2 with stiffness = M Omega^2.
    double stiffness = 0.0;
    /// Polynomial: V = sum_k coefficients[k] X^k, degree <= 6.
    std::vector<double> coefficients;

    static PotentialSpec free() { return {}; }
    static PotentialSpec harmonic(double stiffness);
    static PotentialSpec polynomial(std::vector<double> coefficients);

    /// InvalidParameter for negative stiffness or degree > 6.
    void validate() const;
};

std::string_view to_string(PotentialSpec::Kind k);
PotentialSpec::Kind potential_kind_from_string(std::string_view s);

struct ClassicalState {
    double X = 0.0;
    double P = 0.0;  ///< M dX/dt
};

double potential_energy(const PotentialSpec& V, double X);

/// -V'(X)
double potential_force(const PotentialSpec& V, double X);

/// Non-conservative part of the hybrid classical equation in force form,
///   F = -lambda <x> - hbar sigma dW/dt.
double hybrid_force(double lambda, double x_expect, double sigma, double hbar, const NoiseIncrement& noise);

inline constexpr double kDefaultBlowupBound = 1e9;

/// Semi-implicit Euler: P' = P + F dt, X' = X + P'/M dt.
/// NumericalBlowup when |X'| or |P'| exceeds `bound` or is not finite.
ClassicalState classical_step(const ClassicalState& s, double M, double F_total, double dt,
                              double bound = kDefaultBlowupBound);

}  // namespace hqc
