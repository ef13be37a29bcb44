#include "hqc/oscillator.hpp"

#include <cmath>
#include <string>

#include "hqc/errors.hpp"

namespace hqc {

void FockBasis::validate() const {
    if (dim < 2) throw InvalidParameter("FockBasis: dim must be >= 2, got " + std::to_string(dim));
    if (!(m > 0.0)) throw InvalidParameter("FockBasis: m must be positive");
    if (!(omega > 0.0)) throw InvalidParameter("FockBasis: omega must be positive");
    if (!(hbar > 0.0)) throw InvalidParameter("FockBasis: hbar must be positive");
}

double FockBasis::x_scale() const { return std::sqrt(hbar / (2.0 * m * omega)); }

double FockBasis::p_scale() const { return std::sqrt(hbar * m * omega / 2.0); }

OscillatorOperators build_operators(const FockBasis& basis) {
    basis.validate();
    const int n = basis.dim;
    OscillatorOperators ops;
    ops.basis = basis;

    const double xs = basis.x_scale();
    const double ps = basis.p_scale();

    ops.x.diag = RVector::Zero(n);
    ops.x.lower.resize(n - 1);
    ops.p.diag = RVector::Zero(n);
    ops.p.lower.resize(n - 1);
    ops.h0.diag.resize(n);
    ops.h0.lower = CVector::Zero(n - 1);

    for (int k = 0; k + 1 < n; ++k) {
        const double ladder = std::sqrt(static_cast<double>(k + 1));
        // (a^dag)_{k+1,k} = sqrt(k+1)
        ops.x.lower(k) = xs * ladder;
        ops.p.lower(k) = cplx(0.0, ps * ladder);
    }
    for (int k = 0; k < n; ++k) ops.h0.diag(k) = basis.hbar * basis.omega * (k + 0.5);
    return ops;
}

QuantumState QuantumState::from_amplitudes(CVector amplitudes, double truncation_tol) {
    const double nrm = amplitudes.norm();
    if (!(nrm > 1e-300) || !std::isfinite(nrm))
        throw DegenerateState("QuantumState: amplitude vector has zero or non-finite norm");
    amplitudes /= nrm;
    check_truncation(amplitudes, truncation_tol, "QuantumState");
    return QuantumState(std::move(amplitudes));
}

QuantumState QuantumState::unchecked(CVector amplitudes) {
    const double nrm = amplitudes.norm();
    if (!(nrm > 1e-300) || !std::isfinite(nrm))
        throw DegenerateState("QuantumState: amplitude vector has zero or non-finite norm");
    amplitudes /= nrm;
    return QuantumState(std::move(amplitudes));
}

QuantumState QuantumState::fock(int dim, int n) {
    if (dim < 2 || n < 0 || n >= dim) throw InvalidParameter("QuantumState::fock: level out of range");
    CVector v = CVector::Zero(dim);
    v(n) = 1.0;
    return QuantumState(std::move(v));
}

double QuantumState::top_occupation() const {
    const auto n = amps_.size();
    return std::norm(amps_(n - 1)) + std::norm(amps_(n - 2));
}

double QuantumState::overlap_abs(const QuantumState& other) const {
    if (other.dim() != dim()) throw DimensionMismatch("overlap: dimension mismatch");
    return std::abs(amps_.dot(other.amps_));
}

void check_truncation(const CVector& amps, double tol, const char* where) {
    const auto n = amps.size();
    if (n < 2) return;
    const double total = amps.squaredNorm();
    const double top = std::norm(amps(n - 1)) + std::norm(amps(n - 2));
    if (!(top <= tol * total)) {
        throw TruncationError(std::string(where) + ": top two Fock levels hold " +
                              std::to_string(top / total) + " of the norm (limit " +
                              std::to_string(tol) + ")");
    }
}

cplx coherent_alpha(const FockBasis& basis, double x0, double p0) {
    return {std::sqrt(basis.m * basis.omega / (2.0 * basis.hbar)) * x0,
            p0 / std::sqrt(2.0 * basis.hbar * basis.m * basis.omega)};
}

CoherentState coherent_state(const FockBasis& basis, double x0, double p0) {
    basis.validate();
    const cplx alpha = coherent_alpha(basis, x0, p0);
    const double a2 = std::norm(alpha);
    if (!(a2 + 5.0 * std::sqrt(a2) < basis.dim)) {
        throw TruncationError("coherent_state: packet at (" + std::to_string(x0) + ", " +
                              std::to_string(p0) + ") does not fit in dim " +
                              std::to_string(basis.dim));
    }
    CVector c(basis.dim);
    c(0) = std::exp(-0.5 * a2);
    for (int k = 1; k < basis.dim; ++k) c(k) = c(k - 1) * alpha / std::sqrt(static_cast<double>(k));
    const double leakage = std::max(0.0, 1.0 - c.squaredNorm());
    if (leakage > kLeakageTolerance) {
        throw TruncationError("coherent_state: truncation leakage " + std::to_string(leakage) +
                              " exceeds " + std::to_string(kLeakageTolerance));
    }
    return {QuantumState::from_amplitudes(std::move(c)), leakage};
}

Superposition superpose(std::span<const QuantumState> states, std::span<const cplx> amps) {
    if (states.empty() || states.size() != amps.size())
        throw InvalidParameter("superpose: need equally many (>= 1) states and amplitudes");
    const int dim = states.front().dim();
    CVector acc = CVector::Zero(dim);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dim() != dim) throw DimensionMismatch("superpose: dimension mismatch");
        acc += amps[i] * states[i].amplitudes();
    }
    const double prenorm = acc.norm();
    if (!(prenorm >= 1e-12))
        throw DegenerateSuperposition("superpose: components cancel (norm " +
                                      std::to_string(prenorm) + ")");
    return {QuantumState::from_amplitudes(std::move(acc)), prenorm};
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i; j < m.cols(); ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    return true;
}

double expect(const OperatorMatrix& op, const QuantumState& psi) {
    if (op.entries.rows() != psi.dim()) throw DimensionMismatch("expect: dimension mismatch");
    if (!is_hermitian(op.entries)) throw NonHermitian("expect: operator is not Hermitian");
    const cplx value = psi.amplitudes().dot(op.entries * psi.amplitudes());
    if (std::abs(value.imag()) > 1e-10)
        throw NonHermitian("expect: imaginary residue " + std::to_string(value.imag()));
    return value.real();
}

double variance(const OperatorMatrix& op, const QuantumState& psi) {
    const double mean = expect(op, psi);
    const CVector opsi = op.entries * psi.amplitudes();
    const double second = opsi.squaredNorm();  // <psi|op^dag op|psi> = <op^2> for Hermitian op
    const double var = second - mean * mean;
    if (var < -1e-12) throw NumericalBlowup("variance: negative value " + std::to_string(var));
    return std::max(0.0, var);
}

PositionMoments position_moments(const HermitianTridiagonal& x, const CVector& psi) {
    const double nrm2 = psi.squaredNorm();
    CVector xpsi;
    x.apply(psi, xpsi);
    const double mean = std::real(psi.dot(xpsi)) / nrm2;
    const double second = xpsi.squaredNorm() / nrm2;
    return {mean, std::max(0.0, second - mean * mean)};
}

}  // namespace hqc
