#include "hqc/classical.hpp"

#include <cmath>
#include <string>

#include "hqc/errors.hpp"

namespace hqc {

PotentialSpec PotentialSpec::harmonic(double stiffness) {
    PotentialSpec v;
    v.kind = Kind::Harmonic;
    v.stiffness = stiffness;
    v.validate();
    return v;
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coefficients) {
    PotentialSpec v;
    v.kind = Kind::Polynomial;
    v.coefficients = std::move(coefficients);
    v.validate();
    return v;
}

void PotentialSpec::validate() const {
    if (kind == Kind::Harmonic && !(stiffness >= 0.0))
        throw InvalidParameter("PotentialSpec: stiffness must be >= 0");
    if (kind == Kind::Polynomial && coefficients.size() > 7)
        throw InvalidParameter("PotentialSpec: polynomial degree must be <= 6");
}

std::string_view to_string(PotentialSpec::Kind k) {
    switch (k) {
        case PotentialSpec::Kind::Free: return "free";
        case PotentialSpec::Kind::Harmonic: return "harmonic";
        case PotentialSpec::Kind::Polynomial: return "polynomial";
    }
    return "free";
}

PotentialSpec::Kind potential_kind_from_string(std::string_view s) {
    if (s == "free") return PotentialSpec::Kind::Free;
    if (s == "harmonic") return PotentialSpec::Kind::Harmonic;
    if (s == "polynomial") return PotentialSpec::Kind::Polynomial;
    throw InvalidParameter("unknown potential kind '" + std::string(s) + "'");
}

double potential_energy(const PotentialSpec& V, double X) {
    switch (V.kind) {
        case PotentialSpec::Kind::Free: return 0.0;
        case PotentialSpec::Kind::Harmonic: return 0.5 * V.stiffness * X * X;
        case PotentialSpec::Kind::Polynomial: {
            double acc = 0.0;
            for (auto it = V.coefficients.rbegin(); it != V.coefficients.rend(); ++it) acc = acc * X + *it;
            return acc;
        }
    }
    return 0.0;
}

double potential_force(const PotentialSpec& V, double X) {
    switch (V.kind) {
        case PotentialSpec::Kind::Free: return 0.0;
        case PotentialSpec::Kind::Harmonic: return -V.stiffness * X;
        case PotentialSpec::Kind::Polynomial: {
            // Horner on V'(X) = sum_k k c_k X^{k-1}
            double acc = 0.0;
            for (std::size_t k = V.coefficients.size(); k-- > 1;) acc = acc * X + static_cast<double>(k) * V.coefficients[k];
            return -acc;
        }
    }
    return 0.0;
}

double hybrid_force(double lambda, double x_expect, double sigma, double hbar, const NoiseIncrement& noise) {
    if (!(noise.dt > 0.0)) throw InvalidParameter("hybrid_force: dt must be positive");
    return -lambda * x_expect - hbar * sigma * noise.rate();
}

ClassicalState classical_step(const ClassicalState& s, double M, double F_total, double dt, double bound) {
    if (!(dt > 0.0)) throw InvalidParameter("classical_step: dt must be positive");
    if (!(M > 0.0)) throw InvalidParameter("classical_step: M must be positive");
    ClassicalState out;
    out.P = s.P + F_total * dt;
    out.X = s.X + (out.P / M) * dt;
    if (!(std::abs(out.X) <= bound) || !(std::abs(out.P) <= bound)) {
        throw NumericalBlowup("classical_step: |X| or |P| exceeded " + std::to_string(bound));
    }
    return out;
}

}  // namespace hqc
