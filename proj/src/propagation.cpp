#include "hqc/propagation.hpp"

#include <cmath>

#include "hqc/errors.hpp"

namespace hqc {

namespace {
using Interleaved = Eigen::Matrix<double, 2, Eigen::Dynamic>;

Eigen::Map<const Interleaved> as_real(const CVector& v) {
    return {reinterpret_cast<const double*>(v.data()), 2, v.size()};
}
Eigen::Map<Interleaved> as_real(CVector& v) { return {reinterpret_cast<double*>(v.data()), 2, v.size()}; }

CVector phase_vector(const RVector& energies, double scale) {
    CVector out(energies.size());
    for (Eigen::Index i = 0; i < energies.size(); ++i) out(i) = std::polar(1.0, -energies(i) * scale);
    return out;
}
}  // namespace

CVector real_times(const RMatrix& m, const CVector& v) {
    CVector out(m.rows());
    as_real(out).noalias() = as_real(v) * m.transpose();
    return out;
}

CVector real_transpose_times(const RMatrix& m, const CVector& v) {
    CVector out(m.cols());
    as_real(out).noalias() = as_real(v) * m;
    return out;
}

PositionSpectrum position_spectrum(const OscillatorOperators& ops) {
    RVector diag = ops.x.diag;
    RVector sub = ops.x.lower.real();
    Eigen::SelfAdjointEigenSolver<RMatrix> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalBlowup("position_spectrum: eigensolver failed");
    PositionSpectrum spec{es.eigenvalues(), es.eigenvectors()};
    // Residual check: x v_i = x_i v_i.
    const CMatrix xd = ops.x.dense();
    const RMatrix resid = xd.real() * spec.eigenvectors - spec.eigenvectors * spec.eigenvalues.asDiagonal();
    if (resid.cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff()))
        throw NumericalBlowup("position_spectrum: eigenvector residual too large");
    return spec;
}

ExactPropagator::ExactPropagator(const OscillatorOperators& ops, double lambda, double dt)
    : ops_(&ops), lambda_(lambda), dt_(dt) {
    if (!(dt > 0.0)) throw InvalidParameter("ExactPropagator: dt must be positive");
}

void ExactPropagator::prepare(double X) {
    const double shift = lambda_ * X;
    if (cached_shift_ && *cached_shift_ == shift) return;
    const double hbar = ops_->basis.hbar;
    RVector diag = ops_->h0.diag;
    RVector sub = shift * ops_->x.lower.real();
    Eigen::SelfAdjointEigenSolver<RMatrix> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalBlowup("ExactPropagator: eigensolver failed");
    vectors_ = es.eigenvectors();
    phases_ = phase_vector(es.eigenvalues(), dt_ / hbar);
    cached_shift_ = shift;
}

CVector ExactPropagator::apply(const CVector& psi, double X) {
    prepare(X);
    CVector eig = real_transpose_times(vectors_, psi);
    eig.array() *= phases_.array();
    return real_times(vectors_, eig);
}

CMatrix ExactPropagator::matrix(double X) {
    prepare(X);
    const CMatrix v = vectors_.cast<cplx>();
    return v * phases_.asDiagonal() * v.transpose();
}

SplitPropagator::SplitPropagator(const OscillatorOperators& ops, const PositionSpectrum& spectrum,
                                 double lambda, double dt)
    : spectrum_(&spectrum), lambda_(lambda), dt_(dt), hbar_(ops.basis.hbar) {
    if (!(dt > 0.0)) throw InvalidParameter("SplitPropagator: dt must be positive");
    half_h0_ = phase_vector(ops.h0.diag, 0.5 * dt / hbar_);
    full_h0_ = phase_vector(ops.h0.diag, dt / hbar_);
}

CVector SplitPropagator::apply(const CVector& psi, double X) const {
    const double shift = lambda_ * X;
    if (shift == 0.0) return (psi.array() * full_h0_.array()).matrix();
    CVector v = (psi.array() * half_h0_.array()).matrix();
    CVector pos = spectrum_->to_position(v);
    pos.array() *= phase_vector(spectrum_->eigenvalues, shift * dt_ / hbar_).array();
    v = spectrum_->to_fock(pos);
    v.array() *= half_h0_.array();
    return v;
}

}  // namespace hqc
