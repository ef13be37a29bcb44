#pragma once

#include <cstdint>

#include "hqc/model.hpp"
#include "hqc/noise.hpp"
#include "hqc/propagation.hpp"
#include "hqc/record.hpp"

namespace hqc {

/// Resolution of one Gaussian position measurement.
struct KrausWidth {
    double delta_sq = 0.0;  ///< variance of the Gaussian resolution
    double delta_t = 0.0;   ///< time slice it belongs to

    double delta() const;
};

/// delta^2 = hbar^2 sigma^2 / (lambda^2 dt), so delta^2 dt stays fixed as
/// dt shrinks. InvalidParameter for lambda = 0 or non-positive sigma, hbar, dt.
KrausWidth width_from_continuum(double lambda, double sigma, double hbar, double delta_t);

struct MeasurementOutcome {
    double x_bar = 0.0;
    /// log p(x_bar) for the pre-measurement state, with the Kraus operator
    /// normalized so that the outcome density integrates to one.
    double log_density = 0.0;
    /// sqrt(sum_s g_s^2 |phi_s|^2) with g_s = exp(-(x_s - x_bar)^2 / 4 delta^2),
    /// i.e. the norm the state keeps before renormalization (up to the
    /// constant prefactor).
    double kept_norm = 0.0;
};

/// Samples x_bar exactly from sum_s |phi_s|^2 N(x_s, delta^2) (eigenvalue
/// first, then Gaussian blur) and applies the Kraus factor to `pos`, the
/// state in the position eigenbasis, renormalizing it in place. Consumes
/// three counter values from `rng`: one uniform and one Gaussian.
/// DegenerateState if the post-measurement norm underflows.
MeasurementOutcome measure_position(CVector& pos, const RVector& eigenvalues, const KrausWidth& width,
                                    NoiseStream& rng);

struct ChainStepResult {
    QuantumState psi;
    MeasurementOutcome outcome;
};

/// Unitary slice exp(-i (H0 + lambda X x) dt / hbar) followed by one Gaussian
/// position measurement.
ChainStepResult chain_step(const QuantumState& psi, double X, const KrausWidth& width,
                           const PositionSpectrum& spectrum, ExactPropagator& unitary, NoiseStream& rng,
                           double truncation_tol = kTruncationTolerance);

/// Ensemble average of chain_step on a density matrix (Fock basis):
/// rho -> U rho U^dag, then elementwise damping of the position-basis
/// coherences by exp(-(x_s - x_s')^2 / (8 delta^2)).
CMatrix chain_channel_step(const CMatrix& rho, double X, const KrausWidth& width, const PositionSpectrum& spectrum,
                           ExactPropagator& unitary);

/// Trapezoid quadrature of the integral of P(x_bar)^2 over x_bar, with
/// P(x_bar) = (4 pi delta^2)^(-1/2) exp(-(x - x_bar)^2 / 4 delta^2), on the
/// interval [x_min - 6 delta, x_max + 6 delta]. Returned in the Fock basis.
CMatrix povm_square_integral(const PositionSpectrum& spectrum, const KrausWidth& width, int points_per_delta = 40);

/// One chain trajectory with the classical particle driven by
/// -V'(X) - lambda x_bar. lambda = 0 runs the unitary chain without
/// measurement. Rows follow the TrajectoryRow convention; dW holds the
/// equivalent Wiener increment lambda (x_bar - <x>) dt / (hbar sigma) and
/// prenorm the kept norm.
TrajectoryRecord run_chain(const HybridModel& model, std::uint64_t master_seed, std::uint64_t stream_index,
                           const StateObserver& observer = {});

}  // namespace hqc
