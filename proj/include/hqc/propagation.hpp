#pragma once

#include <optional>

#include "hqc/oscillator.hpp"

namespace hqc {

/// Real matrix times complex vector, done as one real 2xN product on the
/// interleaved storage.
CVector real_times(const RMatrix& m, const CVector& v);
/// m^T * v
CVector real_transpose_times(const RMatrix& m, const CVector& v);

/// Eigen-decomposition of the truncated position operator. Its eigenvalues
/// double as the quadrature grid of the measurement.
struct PositionSpectrum {
    RVector eigenvalues;   ///< ascending
    RMatrix eigenvectors;  ///< columns orthonormal, x v_i = eigenvalues(i) v_i

    /// Fock amplitudes -> position-eigenbasis amplitudes.
    CVector to_position(const CVector& fock) const { return real_transpose_times(eigenvectors, fock); }
    CVector to_fock(const CVector& pos) const { return real_times(eigenvectors, pos); }
};

PositionSpectrum position_spectrum(const OscillatorOperators& ops);

/// exp(-i (H0 + lambda X x) dt / hbar) from an exact eigen-decomposition of
/// the tridiagonal Hamiltonian. The decomposition is cached for the last
/// value of lambda X.
class ExactPropagator {
public:
    ExactPropagator(const OscillatorOperators& ops, double lambda, double dt);

    CVector apply(const CVector& psi, double X);

    /// Dense unitary for the given X.
    CMatrix matrix(double X);

    double dt() const { return dt_; }

private:
    void prepare(double X);

    const OscillatorOperators* ops_;
    double lambda_;
    double dt_;
    std::optional<double> cached_shift_;
    RMatrix vectors_;
    CVector phases_;
};

/// Strang splitting exp(-iH0 dt/2) exp(-i lambda X x dt) exp(-iH0 dt/2),
/// exact when lambda X = 0 (then it is a pure diagonal phase).
class SplitPropagator {
public:
    SplitPropagator(const OscillatorOperators& ops, const PositionSpectrum& spectrum, double lambda,
                    double dt);

    CVector apply(const CVector& psi, double X) const;

    double dt() const { return dt_; }

private:
    const PositionSpectrum* spectrum_;
    double lambda_;
    double dt_;
    double hbar_;
    CVector half_h0_;
    CVector full_h0_;
};

}  // namespace hqc
