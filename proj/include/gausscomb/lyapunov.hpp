#pragma once

#include <gausscomb/gaussian.hpp>

#include <Eigen/Eigenvalues>

#include <complex>
#include <stdexcept>

namespace gausscomb {

/// max Re λ(A).
inline double spectral_abscissa(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
    return es.eigenvalues().real().maxCoeff();
}

/// Largest eigenvalue of the symmetric part, an upper bound on the spectral abscissa.
inline double logarithmic_norm(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

/// Solves A X + X Aᵀ + Q = 0 by Bartels–Stewart on the complex Schur form of A.
/// A must have no eigenvalue pair with λ_i + conj(λ_j) = 0; Hurwitz A always
/// qualifies.
inline Matrix solve_continuous_lyapunov(const Matrix& a, const Matrix& q) {
    if (a.rows() != a.cols() || q.rows() != a.rows() || q.cols() != a.cols())
        throw std::invalid_argument("lyapunov: dimension mismatch");
    using C = std::complex<double>;
    const Eigen::Index n = a.rows();

    Eigen::ComplexSchur<ComplexMatrix> schur(a.cast<C>());
    if (schur.info() != Eigen::Success) throw std::runtime_error("lyapunov: Schur decomposition failed");
    const ComplexMatrix& t = schur.matrixT();
    const ComplexMatrix& u = schur.matrixU();

    // T Y + Y T* = U* (−Q) U
    ComplexMatrix y = u.adjoint() * (-q).cast<C>() * u;
    Eigen::VectorXcd rhs(n);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        rhs = y.col(k);
        const Eigen::Index tail = n - k - 1;
        if (tail > 0) rhs.noalias() -= y.rightCols(tail) * t.row(k).tail(tail).adjoint();
        const C shift = std::conj(t(k, k));
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            const C denom = t(i, i) + shift;
            if (std::abs(denom) < 1e-300)
                throw std::domain_error("lyapunov: singular operator (eigenvalues symmetric about the imaginary axis)");
            const C yi = rhs(i) / denom;
            rhs(i) = yi;
            if (i > 0) rhs.head(i).noalias() -= yi * t.col(i).head(i);
        }
        y.col(k) = rhs;
    }
    Matrix x = (u * y * u.adjoint()).real();
    return 0.5 * (x + x.transpose());
}

}  // namespace gausscomb
