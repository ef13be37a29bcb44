#pragma once

#include <complex>

#include <Eigen/Dense>

namespace hqc {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Hermitian tridiagonal matrix: real diagonal, complex subdiagonal
// lower(n) = M(n+1, n), upper entries are the conjugates.
struct HermitianTridiagonal {
    RVector diag;
    CVector lower;

    Eigen::Index dim() const { return diag.size(); }

    void apply(const CVector& v, CVector& out) const {
        const Eigen::Index n = dim();
        out.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) out(i) = diag(i) * v(i);
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            out(i + 1) += lower(i) * v(i);
            out(i) += std::conj(lower(i)) * v(i + 1);
        }
    }

    CVector apply(const CVector& v) const {
        CVector out;
        apply(v, out);
        return out;
    }

    /// <v|M|v> for a (not necessarily normalized) vector.
    double expect(const CVector& v) const {
        const Eigen::Index n = dim();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) acc += diag(i) * std::norm(v(i));
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            acc += 2.0 * std::real(std::conj(v(i + 1)) * lower(i) * v(i));
        return acc;
    }

    /// M * A
    CMatrix left(const CMatrix& a) const {
        const Eigen::Index n = dim();
        CMatrix out(n, a.cols());
        for (Eigen::Index i = 0; i < n; ++i) out.row(i) = diag(i) * a.row(i);
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            out.row(i + 1) += lower(i) * a.row(i);
            out.row(i) += std::conj(lower(i)) * a.row(i + 1);
        }
        return out;
    }

    /// A * M
    CMatrix right(const CMatrix& a) const {
        const Eigen::Index n = dim();
        CMatrix out(a.rows(), n);
        for (Eigen::Index j = 0; j < n; ++j) out.col(j) = diag(j) * a.col(j);
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            // M(j+1, j) = lower(j), M(j, j+1) = conj(lower(j))
            out.col(j) += lower(j) * a.col(j + 1);
            out.col(j + 1) += std::conj(lower(j)) * a.col(j);
        }
        return out;
    }

    CMatrix dense() const {
        const Eigen::Index n = dim();
        CMatrix m = CMatrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag(i);
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            m(i + 1, i) = lower(i);
            m(i, i + 1) = std::conj(lower(i));
        }
        return m;
    }
};

}  // namespace hqc
