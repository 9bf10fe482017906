#pragma once

#include <gausscomb/modes.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gausscomb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// ⊕_n [[0, 1], [-1, 0]].
inline Matrix symplectic_form(std::size_t n_modes) {
    if (n_modes == 0) throw std::invalid_argument("symplectic form needs at least one mode");
    Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

/// Relative Frobenius asymmetry ‖M - Mᵀ‖ / max(1, ‖M‖).
inline double asymmetry(const Matrix& m) {
    return (m - m.transpose()).norm() / std::max(1.0, m.norm());
}

inline void require_square_even(const Matrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(what) + ": matrix is not square");
    if (m.rows() == 0 || m.rows() % 2 != 0)
        throw std::invalid_argument(std::string(what) + ": dimension must be even and nonzero");
}

/// Real symmetric second-moment matrix over a ModeSet, vacuum = identity.
/// Construction enforces shape and symmetry; physicality is checked separately.
class CovarianceMatrix {
public:
    static constexpr double kSymmetryTolerance = 1e-10;

    CovarianceMatrix(Matrix sigma, ModeSet modes) : sigma_(std::move(sigma)), modes_(std::move(modes)) {
        require_square_even(sigma_, "covariance matrix");
        if (static_cast<std::size_t>(sigma_.rows()) != modes_.dimension())
            throw std::invalid_argument("covariance dimension " + std::to_string(sigma_.rows()) +
                                        " does not match " + std::to_string(modes_.size()) + " modes");
        if (asymmetry(sigma_) > kSymmetryTolerance)
            throw std::invalid_argument("covariance matrix is not symmetric");
        sigma_ = 0.5 * (sigma_ + sigma_.transpose()).eval();
    }

    static CovarianceMatrix vacuum(ModeSet modes) {
        const auto d = static_cast<Eigen::Index>(modes.dimension());
        return {Matrix::Identity(d, d), std::move(modes)};
    }

    const Matrix& matrix() const noexcept { return sigma_; }
    const ModeSet& modes() const noexcept { return modes_; }
    std::size_t mode_count() const noexcept { return modes_.size(); }
    Eigen::Index dimension() const noexcept { return sigma_.rows(); }

private:
    Matrix sigma_;
    ModeSet modes_;
};

/// Symplectic spectrum ν_1 ≤ ... ≤ ν_n, i.e. the distinct |eig(iΩσ)|.
/// Uses the Hermitian form i·LᵀΩL (σ = LLᵀ) when σ is positive definite and
/// falls back to the general eigensolver otherwise.
inline Vector symplectic_eigenvalues(const Matrix& sigma) {
    require_square_even(sigma, "symplectic_eigenvalues");
    const Eigen::Index n = sigma.rows() / 2;
    const Matrix omega = symplectic_form(static_cast<std::size_t>(n));

    Vector magnitudes(sigma.rows());
    Eigen::LLT<Matrix> llt(0.5 * (sigma + sigma.transpose()));
    if (llt.info() == Eigen::Success) {
        const Matrix l = llt.matrixL();
        const Matrix k = l.transpose() * omega * l;
        const ComplexMatrix h = std::complex<double>(0.0, 1.0) * k.cast<std::complex<double>>();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
        magnitudes = es.eigenvalues().cwiseAbs();
    } else {
        Eigen::EigenSolver<Matrix> es(omega * sigma, false);
        magnitudes = es.eigenvalues().cwiseAbs();
    }
    std::sort(magnitudes.data(), magnitudes.data() + magnitudes.size());
    Vector nu(n);
    for (Eigen::Index k = 0; k < n; ++k) nu(k) = 0.5 * (magnitudes(2 * k) + magnitudes(2 * k + 1));
    return nu;
}

struct PhysicalityReport {
    bool physical = false;
    double min_symplectic_eigenvalue = 0.0;
    double asymmetry = 0.0;
};

inline constexpr double kDefaultPhysicalTolerance = 1e-9;

/// σ + iΩ ⪰ 0 test via the symplectic spectrum. Reports; never throws for
/// unphysical input.
inline PhysicalityReport check_physical(const Matrix& sigma, double tol = kDefaultPhysicalTolerance) {
    require_square_even(sigma, "check_physical");
    PhysicalityReport r;
    r.asymmetry = asymmetry(sigma);
    r.min_symplectic_eigenvalue = symplectic_eigenvalues(sigma).minCoeff();
    r.physical = r.asymmetry <= tol && r.min_symplectic_eigenvalue >= 1.0 - tol;
    return r;
}

inline PhysicalityReport check_physical(const CovarianceMatrix& sigma, double tol = kDefaultPhysicalTolerance) {
    return check_physical(sigma.matrix(), tol);
}

/// Reduced state on `keep`: row/column block extraction in the original basis order.
inline CovarianceMatrix partial_trace(const CovarianceMatrix& sigma, const std::vector<ModeLabel>& keep) {
    std::vector<std::size_t> positions;
    positions.reserve(keep.size());
    for (const auto& m : keep) {
        auto p = sigma.modes().find(m);
        if (!p) throw std::invalid_argument("partial_trace: unknown mode label " + to_string(m));
        positions.push_back(*p);
    }
    std::sort(positions.begin(), positions.end());
    if (std::adjacent_find(positions.begin(), positions.end()) != positions.end())
        throw std::invalid_argument("partial_trace: duplicate mode label");

    const auto k = static_cast<Eigen::Index>(positions.size());
    Matrix reduced(2 * k, 2 * k);
    std::vector<ModeLabel> labels;
    for (Eigen::Index a = 0; a < k; ++a) {
        labels.push_back(sigma.modes()[positions[a]]);
        for (Eigen::Index b = 0; b < k; ++b)
            reduced.block<2, 2>(2 * a, 2 * b) =
                sigma.matrix().block<2, 2>(2 * static_cast<Eigen::Index>(positions[a]),
                                           2 * static_cast<Eigen::Index>(positions[b]));
    }
    return {std::move(reduced), ModeSet(std::move(labels))};
}

inline CovarianceMatrix partial_trace(const CovarianceMatrix& sigma, const std::vector<int>& keep) {
    std::vector<ModeLabel> labels;
    for (int f : keep) labels.push_back({f, 0});
    return partial_trace(sigma, labels);
}

/// log det σ for symmetric positive definite σ. Throws when σ is not PD.
inline double log_determinant(const Matrix& sigma) {
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("determinant of covariance matrix is not positive; state is unphysical");
    const Matrix& l = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

/// μ = 1/√det σ.
inline double purity(const Matrix& sigma) {
    require_square_even(sigma, "purity");
    return std::exp(-0.5 * log_determinant(sigma));
}

inline double purity(const CovarianceMatrix& sigma) { return purity(sigma.matrix()); }

struct TwoModeMetrics {
    double log_negativity = 0.0;  ///< bits
    double purity = 1.0;
    double nu_tilde_minus = 1.0;
};

inline constexpr double kLogNegativityClamp = 1e-12;
inline constexpr double kNuAgreementTolerance = 1e-8;

/// Smallest symplectic eigenvalue of the partial transpose (p of the second
/// mode flipped).
inline double pt_symplectic_min(const Matrix& sigma4) {
    Matrix pt = sigma4;
    pt.row(3) *= -1.0;
    pt.col(3) *= -1.0;
    Eigen::EigenSolver<Matrix> es(symplectic_form(2) * pt, false);
    Vector mags = es.eigenvalues().cwiseAbs();
    return mags.minCoeff();
}

/// Closed form ν̃₋ = √((Δ̃ − √(Δ̃² − 4 det σ)) / 2) with
/// Δ̃ = det a + det b − 2 det c for σ = [[a, c], [cᵀ, b]].
inline double pt_closed_form_min(const Matrix& sigma4) {
    const double det_a = sigma4.block<2, 2>(0, 0).determinant();
    const double det_b = sigma4.block<2, 2>(2, 2).determinant();
    const double det_c = sigma4.block<2, 2>(0, 2).determinant();
    const double det_s = sigma4.determinant();
    const double delta = det_a + det_b - 2.0 * det_c;
    double disc = delta * delta - 4.0 * det_s;
    const double scale = std::max(1.0, delta * delta);
    if (disc < -1e-9 * scale)
        throw std::domain_error("partial-transpose discriminant is negative: numerical breakdown");
    disc = std::max(disc, 0.0);
    const double nu_sq = 0.5 * (delta - std::sqrt(disc));
    if (nu_sq < -1e-12 * scale)
        throw std::domain_error("partial-transpose eigenvalue squared is negative");
    return std::sqrt(std::max(nu_sq, 0.0));
}

/// E_N = max{0, −log₂ ν̃₋} and μ for a two-mode covariance matrix. ν̃₋ is
/// computed from the partially transposed symplectic spectrum and
/// cross-checked against the closed form.
inline TwoModeMetrics log_negativity(const Matrix& sigma4, double physical_tol = kDefaultPhysicalTolerance) {
    if (sigma4.rows() != 4 || sigma4.cols() != 4)
        throw std::invalid_argument("log_negativity needs a 4x4 two-mode covariance matrix");
    const auto report = check_physical(sigma4, physical_tol);
    if (!report.physical)
        throw std::domain_error("log_negativity: unphysical two-mode state (min nu = " +
                                std::to_string(report.min_symplectic_eigenvalue) + ")");

    const double nu_spectral = pt_symplectic_min(sigma4);
    const double nu_closed = pt_closed_form_min(sigma4);
    if (std::abs(nu_spectral - nu_closed) > kNuAgreementTolerance * std::max(1.0, nu_spectral))
        throw std::runtime_error("partial-transpose eigenvalue routes disagree: " + std::to_string(nu_spectral) +
                                 " vs " + std::to_string(nu_closed));

    TwoModeMetrics m;
    m.nu_tilde_minus = nu_spectral;
    const double en = -std::log2(nu_spectral);
    m.log_negativity = en > kLogNegativityClamp ? en : 0.0;
    m.purity = purity(sigma4);
    return m;
}

inline TwoModeMetrics log_negativity(const CovarianceMatrix& sigma, double physical_tol = kDefaultPhysicalTolerance) {
    if (sigma.mode_count() != 2) throw std::invalid_argument("log_negativity needs exactly two modes");
    return log_negativity(sigma.matrix(), physical_tol);
}

}  // namespace gausscomb
