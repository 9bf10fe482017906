#pragma once

#include <gausscomb/gaussian.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace gausscomb {

/// CP Gaussian map σ → X σ Xᵀ + Y.
struct GaussianChannel {
    Matrix x;
    Matrix y;

    Matrix apply(const Matrix& sigma) const { return x * sigma * x.transpose() + y; }
};

/// Y + iΩ − iXΩXᵀ ⪰ 0 up to `tol`.
inline bool is_completely_positive(const GaussianChannel& ch, double tol = 1e-10) {
    if (ch.x.rows() != ch.x.cols() || ch.y.rows() != ch.x.rows() || ch.x.rows() % 2 != 0)
        throw std::invalid_argument("channel matrices must be square, even and of equal size");
    const Matrix omega = symplectic_form(static_cast<std::size_t>(ch.x.rows() / 2));
    const std::complex<double> i(0.0, 1.0);
    ComplexMatrix m = ch.y.cast<std::complex<double>>() + i * (omega - ch.x * omega * ch.x.transpose()).cast<std::complex<double>>();
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

inline void check_loss_angle(double theta) {
    if (!std::isfinite(theta) || theta < 0.0 || theta >= std::numbers::pi / 2)
        throw std::invalid_argument("loss angle theta must lie in [0, pi/2)");
}

/// Thermal attenuator: X = cos θ I, Y = n̄ sin²θ I. n̄ = 1 is quantum limited.
inline GaussianChannel attenuator_channel(double theta, double n_bar, std::size_t n_modes) {
    check_loss_angle(theta);
    if (!(n_bar >= 1.0) || !std::isfinite(n_bar)) throw std::invalid_argument("n_bar must be >= 1");
    if (n_modes == 0) throw std::invalid_argument("attenuator needs at least one mode");
    const auto d = static_cast<Eigen::Index>(2 * n_modes);
    const double s = std::sin(theta);
    return {std::cos(theta) * Matrix::Identity(d, d), n_bar * s * s * Matrix::Identity(d, d)};
}

/// X* = X⁻¹, Y* = X⁻¹ Y X⁻ᵀ.
inline GaussianChannel dual_map(const GaussianChannel& ch) {
    Eigen::FullPivLU<Matrix> lu(ch.x);
    if (!lu.isInvertible()) throw std::domain_error("dual map undefined: X is singular");
    const Matrix xinv = lu.inverse();
    return {xinv, xinv * ch.y * xinv.transpose()};
}

/// Measurement covariance of a general-dyne detection.
struct MeasurementMatrix {
    Matrix sigma_m;
    double theta = 0.0;
    double n_bar = 1.0;
};

/// Ideal heterodyne (σ_m = I) seen through the dual of the attenuator:
/// σ_m = (cos⁻²θ + n̄ tan²θ) I.
inline MeasurementMatrix effective_measurement(double theta, double n_bar, std::size_t n_modes) {
    const GaussianChannel dual = dual_map(attenuator_channel(theta, n_bar, n_modes));
    const auto d = static_cast<Eigen::Index>(2 * n_modes);
    return {dual.apply(Matrix::Identity(d, d)), theta, n_bar};
}

}  // namespace gausscomb
