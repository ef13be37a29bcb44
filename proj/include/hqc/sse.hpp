#pragma once

#include <string_view>

#include "hqc/noise.hpp"
#include "hqc/oscillator.hpp"
#include "hqc/propagation.hpp"

namespace hqc {

/// Which drift coefficient accompanies the diffusion coefficient
/// lambda / (2 hbar sigma).
///
/// PaperLiteral uses lambda^2 / (4 hbar^2 sigma^2), as printed alongside the
/// equation. ChainConsistent uses lambda^2 / (8 hbar^2 sigma^2), the value the
/// Gaussian Kraus chain produces in its continuum limit; only this one keeps
/// the squared norm a martingale (2 c_drift = c_diff^2).
enum class Convention { PaperLiteral, ChainConsistent };

std::string_view to_string(Convention c);
Convention convention_from_string(std::string_view s);

struct SdeCoefficients {
    double c_drift = 0.0;  ///< multiplies (x - <x>)^2 dt
    double c_diff = 0.0;   ///< multiplies (x - <x>) dW
    Convention convention = Convention::ChainConsistent;
};

/// lambda = 0 gives (0, 0). InvalidParameter for sigma <= 0 or hbar <= 0
/// when lambda != 0.
SdeCoefficients make_coefficients(double lambda, double sigma, double hbar, Convention convention);

/// Integrator used for the unitary part of a stochastic step.
enum class SseScheme {
    /// Plain Euler-Maruyama on the whole right-hand side, -(i/hbar) H psi dt
    /// included.
    EulerMaruyama,
    /// Euler-Maruyama for the measurement terms, evaluated on the
    /// start-of-step state, followed by the split unitary propagator over
    /// the full step. Exact when lambda X = 0.
    SplitUnitary,
};

std::string_view to_string(SseScheme s);
SseScheme scheme_from_string(std::string_view s);

struct StepResult {
    QuantumState psi;
    double prenorm;  ///< norm before the explicit renormalization
};

/// Bounds on the pre-normalization norm outside which a step is rejected.
inline constexpr double kPrenormLow = 0.5;
inline constexpr double kPrenormHigh = 2.0;

/// One Euler-Maruyama step of
///   d psi = [-(i/hbar)(H0 + lambda X x) - c_drift (x - <x>)^2] psi dt
///           + c_diff (x - <x>) psi dW
/// followed by renormalization. All expectations use the incoming state.
/// Throws NumericalBlowup when the raw norm leaves (0.5, 2) and
/// TruncationError when the result crowds the top of the basis.
StepResult sse_step(const QuantumState& psi, double X, double lambda, const SdeCoefficients& coeffs,
                    const OscillatorOperators& ops, const NoiseIncrement& noise,
                    double truncation_tol = kTruncationTolerance);

/// Measurement part of a step, without renormalization:
///   psi - c_drift dt (x - <x>)^2 psi + c_diff dW (x - <x>) psi.
CVector measurement_update(const CVector& psi, const HermitianTridiagonal& x, const SdeCoefficients& coeffs,
                           const NoiseIncrement& noise);

/// Reusable stepper bound to one (ops, coefficients, dt, scheme).
class SseIntegrator {
public:
    SseIntegrator(const OscillatorOperators& ops, const PositionSpectrum& spectrum, double lambda,
                  const SdeCoefficients& coeffs, double dt, SseScheme scheme,
                  double truncation_tol = kTruncationTolerance);

    StepResult step(const QuantumState& psi, double X, const NoiseIncrement& noise) const;

    const SdeCoefficients& coefficients() const { return coeffs_; }
    SseScheme scheme() const { return scheme_; }

private:
    const OscillatorOperators* ops_;
    double lambda_;
    SdeCoefficients coeffs_;
    double dt_;
    SseScheme scheme_;
    double truncation_tol_;
    SplitPropagator unitary_;
};

/// Measured value: xbar = <x> + (hbar sigma / lambda) dW/dt.
/// InvalidParameter for lambda = 0, where the record is undefined.
double record_sample(double x_expect, double lambda, double sigma, double hbar, const NoiseIncrement& noise);
double record_sample(const QuantumState& psi, const OscillatorOperators& ops, double lambda, double sigma,
                     double hbar, const NoiseIncrement& noise);

}  // namespace hqc
