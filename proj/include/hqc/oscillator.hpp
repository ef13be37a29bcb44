#pragma once

#include <span>
#include <vector>

#include "hqc/tridiagonal.hpp"

namespace hqc {

/// Occupation of the two highest Fock levels above which a state is
/// considered to have run into the truncation.
inline constexpr double kTruncationTolerance = 1e-6;

/// Largest admissible norm leakage when a coherent packet is cut off.
inline constexpr double kLeakageTolerance = 1e-8;

/// Truncated number basis of the quantum oscillator. Simulation units
/// default to hbar = m = omega = 1.
struct FockBasis {
    int dim = 64;
    double m = 1.0;
    double omega = 1.0;
    double hbar = 1.0;

    /// Throws InvalidParameter unless dim >= 2 and m, omega, hbar > 0.
    void validate() const;

    /// sqrt(hbar / (2 m omega)), the position zero-point width.
    double x_scale() const;
    /// sqrt(hbar m omega / 2)
    double p_scale() const;
    /// Position variance of a coherent state, hbar / (2 m omega).
    double coherent_variance() const { return hbar / (2.0 * m * omega); }
};

enum class OperatorRole { Position, Momentum, Hamiltonian0, Generic };

/// Dense operator with a role tag. Position, momentum and H0 are
/// Hermitian to 1e-12 entrywise.
struct OperatorMatrix {
    CMatrix entries;
    OperatorRole role = OperatorRole::Generic;
};

/// x, p and H0 of the oscillator. The tridiagonal forms are what the
/// integrators use; `dense()` builds the matrices on request.
struct OscillatorOperators {
    FockBasis basis;
    HermitianTridiagonal x;
    HermitianTridiagonal p;
    HermitianTridiagonal h0;

    OperatorMatrix position() const { return {x.dense(), OperatorRole::Position}; }
    OperatorMatrix momentum() const { return {p.dense(), OperatorRole::Momentum}; }
    OperatorMatrix hamiltonian0() const { return {h0.dense(), OperatorRole::Hamiltonian0}; }
};

/// x = sqrt(hbar/2m omega)(a + a^dag), p = i sqrt(hbar m omega/2)(a^dag - a),
/// H0 = hbar omega (a^dag a + 1/2), all on the truncated basis.
OscillatorOperators build_operators(const FockBasis& basis);

/// Unit-norm amplitude vector in the Fock basis.
class QuantumState {
public:
    /// Normalizes `amplitudes` and enforces the truncation guard.
    /// Throws DegenerateState for a (near) zero vector and TruncationError
    /// when the top two levels hold more than `truncation_tol`.
    static QuantumState from_amplitudes(CVector amplitudes,
                                        double truncation_tol = kTruncationTolerance);

    /// Normalizes but skips the truncation guard. Meant for states that are
    /// legitimately spread over the whole basis, such as position eigenvectors.
    static QuantumState unchecked(CVector amplitudes);

    static QuantumState fock(int dim, int n);

    const CVector& amplitudes() const { return amps_; }
    int dim() const { return static_cast<int>(amps_.size()); }

    /// |c_{N-1}|^2 + |c_{N-2}|^2
    double top_occupation() const;

    double overlap_abs(const QuantumState& other) const;

private:
    explicit QuantumState(CVector amps) : amps_(std::move(amps)) {}
    CVector amps_;
};

/// Throws TruncationError when the top two levels of `amps` hold more than
/// `tol` (relative to the squared norm).
void check_truncation(const CVector& amps, double tol, const char* where);

struct CoherentState {
    QuantumState state;
    /// 1 - sum |c_n|^2 before renormalization.
    double leakage;
};

/// sqrt(m omega / 2 hbar) x0 + i p0 / sqrt(2 hbar m omega)
cplx coherent_alpha(const FockBasis& basis, double x0, double p0);

/// Coherent packet centered at (x0, p0). Requires |alpha|^2 + 5|alpha| < dim
/// and leakage <= 1e-8, otherwise TruncationError.
CoherentState coherent_state(const FockBasis& basis, double x0, double p0);

struct Superposition {
    QuantumState state;
    /// Norm of sum a_i |psi_i> before normalization.
    double prenorm;
};

/// Normalized sum of amps[i] * states[i]. Throws InvalidParameter for empty
/// or mismatched lists, DegenerateSuperposition when the raw norm < 1e-12.
Superposition superpose(std::span<const QuantumState> states, std::span<const cplx> amps);

/// <psi|op|psi>. Throws NonHermitian if `op` is not Hermitian to 1e-12 or
/// the imaginary residue exceeds 1e-10.
double expect(const OperatorMatrix& op, const QuantumState& psi);

/// <op^2> - <op>^2, clamped at zero (values below -1e-12 are an error).
double variance(const OperatorMatrix& op, const QuantumState& psi);

bool is_hermitian(const CMatrix& m, double tol = 1e-12);

/// Position mean and variance straight from the tridiagonal x, for the
/// per-step hot paths.
struct PositionMoments {
    double mean;
    double variance;
};
PositionMoments position_moments(const HermitianTridiagonal& x, const CVector& psi);

}  // namespace hqc
