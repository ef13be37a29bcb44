#include "hqc/sse.hpp"

#include <cmath>
#include <string>

#include "hqc/errors.hpp"

namespace hqc {

std::string_view to_string(Convention c) {
    return c == Convention::PaperLiteral ? "paper_literal" : "chain_consistent";
}

Convention convention_from_string(std::string_view s) {
    if (s == "paper_literal") return Convention::PaperLiteral;
    if (s == "chain_consistent") return Convention::ChainConsistent;
    throw InvalidParameter("unknown convention '" + std::string(s) + "'");
}

std::string_view to_string(SseScheme s) {
    return s == SseScheme::EulerMaruyama ? "euler_maruyama" : "split_unitary";
}

SseScheme scheme_from_string(std::string_view s) {
    if (s == "euler_maruyama") return SseScheme::EulerMaruyama;
    if (s == "split_unitary") return SseScheme::SplitUnitary;
    throw InvalidParameter("unknown scheme '" + std::string(s) + "'");
}

SdeCoefficients make_coefficients(double lambda, double sigma, double hbar, Convention convention) {
    if (!std::isfinite(lambda)) throw InvalidParameter("make_coefficients: lambda must be finite");
    if (lambda == 0.0) return {0.0, 0.0, convention};
    if (!(sigma > 0.0)) throw InvalidParameter("make_coefficients: sigma must be positive when lambda != 0");
    if (!(hbar > 0.0)) throw InvalidParameter("make_coefficients: hbar must be positive");
    // Signed, so the state update and the record (which divides by lambda)
    // see the same dW with consistent orientation.
    const double c_diff = lambda / (2.0 * hbar * sigma);
    const double ratio = lambda * lambda / (hbar * hbar * sigma * sigma);
    const double c_drift = convention == Convention::PaperLiteral ? ratio / 4.0 : ratio / 8.0;
    return {c_drift, c_diff, convention};
}

CVector measurement_update(const CVector& psi, const HermitianTridiagonal& x, const SdeCoefficients& coeffs,
                           const NoiseIncrement& noise) {
    CVector a_psi;
    x.apply(psi, a_psi);
    const double mean = std::real(psi.dot(a_psi));
    a_psi -= mean * psi;
    CVector a2_psi;
    x.apply(a_psi, a2_psi);
    a2_psi -= mean * a_psi;
    CVector out = psi;
    out -= (coeffs.c_drift * noise.dt) * a2_psi;
    out += (coeffs.c_diff * noise.dW) * a_psi;
    return out;
}

namespace {

StepResult finish(CVector phi, double truncation_tol, const char* where) {
    const double prenorm = phi.norm();
    if (!(prenorm > kPrenormLow && prenorm < kPrenormHigh)) {
        throw NumericalBlowup(std::string(where) + ": pre-normalization norm " + std::to_string(prenorm) +
                              " outside (0.5, 2)");
    }
    phi /= prenorm;
    check_truncation(phi, truncation_tol, where);
    return {QuantumState::unchecked(std::move(phi)), prenorm};
}

}  // namespace

StepResult sse_step(const QuantumState& psi, double X, double lambda, const SdeCoefficients& coeffs,
                    const OscillatorOperators& ops, const NoiseIncrement& noise, double truncation_tol) {
    if (!(noise.dt > 0.0)) throw InvalidParameter("sse_step: dt must be positive");
    const CVector& v = psi.amplitudes();
    CVector phi = measurement_update(v, ops.x, coeffs, noise);
    CVector h_psi;
    ops.h0.apply(v, h_psi);
    if (lambda * X != 0.0) {
        CVector x_psi;
        ops.x.apply(v, x_psi);
        h_psi += (lambda * X) * x_psi;
    }
    phi += cplx(0.0, -noise.dt / ops.basis.hbar) * h_psi;
    return finish(std::move(phi), truncation_tol, "sse_step");
}

SseIntegrator::SseIntegrator(const OscillatorOperators& ops, const PositionSpectrum& spectrum, double lambda,
                             const SdeCoefficients& coeffs, double dt, SseScheme scheme, double truncation_tol)
    : ops_(&ops),
      lambda_(lambda),
      coeffs_(coeffs),
      dt_(dt),
      scheme_(scheme),
      truncation_tol_(truncation_tol),
      unitary_(ops, spectrum, lambda, dt) {}

StepResult SseIntegrator::step(const QuantumState& psi, double X, const NoiseIncrement& noise) const {
    if (scheme_ == SseScheme::EulerMaruyama)
        return sse_step(psi, X, lambda_, coeffs_, *ops_, noise, truncation_tol_);
    if (noise.dt != dt_) throw InvalidParameter("SseIntegrator: noise dt differs from integrator dt");
    CVector phi = measurement_update(psi.amplitudes(), ops_->x, coeffs_, noise);
    phi = unitary_.apply(phi, X);
    return finish(std::move(phi), truncation_tol_, "sse_step");
}

double record_sample(double x_expect, double lambda, double sigma, double hbar, const NoiseIncrement& noise) {
    if (lambda == 0.0) throw InvalidParameter("record_sample: the record is undefined for lambda = 0");
    if (!(noise.dt > 0.0)) throw InvalidParameter("record_sample: dt must be positive");
    return x_expect + (hbar * sigma / lambda) * noise.rate();
}

double record_sample(const QuantumState& psi, const OscillatorOperators& ops, double lambda, double sigma,
                     double hbar, const NoiseIncrement& noise) {
    return record_sample(ops.x.expect(psi.amplitudes()), lambda, sigma, hbar, noise);
}

}  // namespace hqc
