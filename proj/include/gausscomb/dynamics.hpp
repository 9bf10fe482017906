#pragma once

#include <gausscomb/channels.hpp>
#include <gausscomb/gaussian.hpp>
#include <gausscomb/lyapunov.hpp>
#include <gausscomb/pump_graph.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace gausscomb {

/// σ̇ = Aσ + σAᵀ + D with bath coupling C = √κ Ωᵀ.
struct DriftDiffusion {
    Matrix drift;
    Matrix diffusion;
    Matrix coupling;
    Matrix bath;
    double kappa = 1.0;
    ModeSet modes;
};

/// A = Ω H + ½ Ω C Ω Cᵀ, D = Ω C σ_B Cᵀ Ωᵀ.
inline DriftDiffusion assemble_drift_diffusion(const HamiltonianMatrix& h, double kappa, const Matrix& bath) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive");
    require_square_even(h.quad, "hamiltonian");
    if (bath.rows() != h.quad.rows() || bath.cols() != h.quad.cols())
        throw std::invalid_argument("bath covariance dimension does not match the hamiltonian");
    if (static_cast<std::size_t>(h.quad.rows()) != h.modes.dimension())
        throw std::invalid_argument("hamiltonian dimension does not match its mode set");

    const Matrix omega = symplectic_form(h.modes.size());
    DriftDiffusion dd;
    dd.kappa = kappa;
    dd.modes = h.modes;
    dd.bath = bath;
    dd.coupling = std::sqrt(kappa) * omega.transpose();
    dd.drift = omega * h.quad + 0.5 * omega * dd.coupling * omega * dd.coupling.transpose();
    dd.diffusion = omega * dd.coupling * bath * dd.coupling.transpose() * omega.transpose();
    dd.diffusion = 0.5 * (dd.diffusion + dd.diffusion.transpose()).eval();
    return dd;
}

/// Vacuum bath σ_B = I.
inline DriftDiffusion assemble_drift_diffusion(const HamiltonianMatrix& h, double kappa = 1.0) {
    const auto d = h.quad.rows();
    return assemble_drift_diffusion(h, kappa, Matrix::Identity(d, d));
}

/// Unconditional dynamics above the parametric oscillation threshold.
class ThresholdExceeded : public std::runtime_error {
public:
    explicit ThresholdExceeded(double abscissa)
        : std::runtime_error("unconditional threshold exceeded: spectral abscissa of the drift is " +
                             std::to_string(abscissa)),
          abscissa_(abscissa) {}
    double spectral_abscissa() const noexcept { return abscissa_; }

private:
    double abscissa_;
};

enum class SteadyStateMethod { lyapunov, riccati_integrated, riccati_direct };

inline const char* to_string(SteadyStateMethod m) {
    switch (m) {
        case SteadyStateMethod::lyapunov: return "lyapunov";
        case SteadyStateMethod::riccati_integrated: return "riccati-integrated";
        case SteadyStateMethod::riccati_direct: return "riccati-direct";
    }
    return "?";
}

struct SteadyStateResult {
    CovarianceMatrix sigma;
    double residual = 0.0;  ///< ‖σ̇‖_F at the returned σ
    SteadyStateMethod method = SteadyStateMethod::lyapunov;
    bool converged = false;
    long steps = 0;
    double final_time = 0.0;
    std::string diagnostic;
};

inline double unconditional_rhs_norm(const DriftDiffusion& dd, const Matrix& sigma) {
    return (dd.drift * sigma + sigma * dd.drift.transpose() + dd.diffusion).norm();
}

/// Aσ + σAᵀ + D = 0 for Hurwitz A.
inline SteadyStateResult solve_lyapunov_steady(const DriftDiffusion& dd) {
    const double abscissa = spectral_abscissa(dd.drift);
    if (abscissa >= 0.0) throw ThresholdExceeded(abscissa);
    Matrix sigma = solve_continuous_lyapunov(dd.drift, dd.diffusion);
    const double residual = unconditional_rhs_norm(dd, sigma);
    const bool ok = residual < 1e-10 * std::max(1.0, dd.diffusion.norm());
    SteadyStateResult r{CovarianceMatrix(std::move(sigma), dd.modes), residual, SteadyStateMethod::lyapunov, ok, 1,
                        0.0, ok ? "" : "lyapunov residual above tolerance"};
    return r;
}

/// Aσ + σAᵀ + D − (ΩCσ_B − σCΩ)(σ_B + σ_m)⁻¹(ΩCσ_B − σCΩ)ᵀ.
inline Matrix riccati_rhs(const Matrix& sigma, const DriftDiffusion& dd, const MeasurementMatrix& meas) {
    if (sigma.rows() != dd.drift.rows() || meas.sigma_m.rows() != dd.drift.rows())
        throw std::invalid_argument("riccati_rhs: dimension mismatch");
    const Matrix omega = symplectic_form(dd.modes.size());
    Eigen::LLT<Matrix> gain(dd.bath + meas.sigma_m);
    if (gain.info() != Eigen::Success) throw std::domain_error("riccati_rhs: sigma_B + sigma_m is singular");
    const Matrix innovation = omega * dd.coupling * dd.bath - sigma * dd.coupling * omega;
    Matrix rhs = dd.drift * sigma + sigma * dd.drift.transpose() + dd.diffusion -
                 innovation * gain.solve(innovation.transpose());
    return 0.5 * (rhs + rhs.transpose());
}

namespace detail {

inline std::optional<double> scalar_identity(const Matrix& m) {
    const double s = m(0, 0);
    if ((m - s * Matrix::Identity(m.rows(), m.cols())).norm() <= 1e-14 * std::max(1.0, std::abs(s)) * m.rows())
        return s;
    return std::nullopt;
}

/// Precomputed pieces of the Riccati right-hand side. With innovation
/// P − σQ and gain K = (σ_B + σ_m)⁻¹ the correction is (P − σQ) K (P − σQ)ᵀ.
class RiccatiOperator {
public:
    RiccatiOperator(const DriftDiffusion& dd, const MeasurementMatrix& meas) : dd_(dd) {
        const Matrix omega = symplectic_form(dd.modes.size());
        p_ = omega * dd.coupling * dd.bath;
        q_ = dd.coupling * omega;
        Eigen::LLT<Matrix> llt(dd.bath + meas.sigma_m);
        if (llt.info() != Eigen::Success) throw std::domain_error("sigma_B + sigma_m is not positive definite");
        k_ = llt.solve(Matrix::Identity(p_.rows(), p_.cols()));
        k_ = 0.5 * (k_ + k_.transpose()).eval();
        q_scalar_ = scalar_identity(q_);
        k_scalar_ = scalar_identity(k_);
    }

    const Matrix& drift() const { return dd_.drift; }
    const Matrix& diffusion() const { return dd_.diffusion; }

    void innovation(const Matrix& sigma, Matrix& out) const {
        if (q_scalar_)
            out = p_ - *q_scalar_ * sigma;
        else
            out.noalias() = p_ - sigma * q_;
    }

    void evaluate(const Matrix& sigma, Matrix& out) const {
        innovation(sigma, work_);
        if (k_scalar_) {
            out.noalias() = -*k_scalar_ * (work_ * work_.transpose());
        } else {
            work2_.noalias() = work_ * k_;
            out.noalias() = -(work2_ * work_.transpose());
        }
        tmp_.noalias() = dd_.drift * sigma;
        out += tmp_ + tmp_.transpose() + dd_.diffusion;
        out = 0.5 * (out + out.transpose()).eval();
    }

    /// Linearisation A + G with G = (P − σQ) K Qᵀ.
    Matrix closed_loop(const Matrix& sigma) const {
        Matrix innov;
        innovation(sigma, innov);
        return dd_.drift + innov * k_ * q_.transpose();
    }

    const Matrix& p() const { return p_; }
    const Matrix& q() const { return q_; }
    const Matrix& k() const { return k_; }

private:
    const DriftDiffusion& dd_;
    Matrix p_, q_, k_;
    std::optional<double> q_scalar_, k_scalar_;
    mutable Matrix work_, work2_, tmp_;
};

}  // namespace detail

struct RiccatiOptions {
    enum class Method { integrate, newton, both };
    Method method = Method::integrate;
    double tol = 1e-8;           ///< relative residual ‖σ̇‖_F / max(1, ‖D‖_F)
    int hold = 50;               ///< consecutive accepted steps below tol
    double time_budget = 1e4;    ///< in units of 1/κ
    long max_steps = 5'000'000;
    double rtol = 1e-10;         ///< integrator local error tolerances
    double atol = 1e-12;
    int max_newton_iterations = 200;
    double agreement_tol = 1e-6; ///< integration vs direct, relative Frobenius
};

inline const char* to_string(RiccatiOptions::Method m) {
    switch (m) {
        case RiccatiOptions::Method::integrate: return "integrate";
        case RiccatiOptions::Method::newton: return "newton";
        case RiccatiOptions::Method::both: return "both";
    }
    return "?";
}

namespace detail {

inline std::string closed_loop_note(const RiccatiOperator& op, const Matrix& sigma) {
    try {
        return "; closed-loop spectral abscissa " + std::to_string(spectral_abscissa(op.closed_loop(sigma)));
    } catch (const std::exception&) {
        return "";
    }
}

/// Dormand–Prince 5(4) from σ₀ = I with per-step symmetrisation.
inline SteadyStateResult integrate_riccati(const DriftDiffusion& dd, const RiccatiOperator& op,
                                           const RiccatiOptions& opts) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Eigen::Index d = dd.drift.rows();
    const double scale = std::max(1.0, dd.diffusion.norm());
    const double time_budget = opts.time_budget / dd.kappa;

    Matrix y = Matrix::Identity(d, d);
    Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d), stage(d, d), ynew(d, d), err(d, d);
    op.evaluate(y, k1);

    double t = 0.0;
    double h = 0.05 / dd.kappa;
    long steps = 0;
    int held = 0;
    double residual = k1.norm();
    if (residual / scale < opts.tol) held = opts.hold;  // already at a fixed point

    while (held < opts.hold && t < time_budget && steps < opts.max_steps) {
        stage = y + h * (a21 * k1);
        op.evaluate(stage, k2);
        stage = y + h * (a31 * k1 + a32 * k2);
        op.evaluate(stage, k3);
        stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        op.evaluate(stage, k4);
        stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        op.evaluate(stage, k5);
        stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        op.evaluate(stage, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        ynew = 0.5 * (ynew + ynew.transpose()).eval();
        op.evaluate(ynew, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const auto tol_scale = (opts.atol + opts.rtol * y.array().abs().max(ynew.array().abs()));
        const double err_norm = std::sqrt((err.array() / tol_scale).square().mean());
        if (!std::isfinite(err_norm)) {
            h *= 0.1;
            if (h < 1e-14 / dd.kappa) break;
            continue;
        }
        if (err_norm <= 1.0) {
            t += h;
            ++steps;
            y.swap(ynew);
            k1.swap(k7);
            residual = k1.norm();
            held = residual / scale < opts.tol ? held + 1 : 0;
        }
        const double factor = err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
        h = std::min(h, std::max(time_budget - t, 1e-12));
    }

    const bool reached = held >= opts.hold;
    SteadyStateResult r{CovarianceMatrix(y, dd.modes), residual, SteadyStateMethod::riccati_integrated, false, steps,
                        t, ""};
    if (!reached) {
        r.diagnostic = "integration budget exhausted at t=" + std::to_string(t) + " after " + std::to_string(steps) +
                       " steps; relative residual " + std::to_string(residual / scale) + closed_loop_note(op, y);
        return r;
    }
    const auto phys = check_physical(y);
    r.converged = phys.physical;
    if (!phys.physical)
        r.diagnostic = "steady state unphysical (min nu = " + std::to_string(phys.min_symplectic_eigenvalue) + ")";
    return r;
}

/// Newton–Kleinman iteration on the algebraic Riccati equation from a
/// stabilising start.
inline SteadyStateResult newton_riccati(const DriftDiffusion& dd, const RiccatiOperator& op,
                                        const RiccatiOptions& opts) {
    const Eigen::Index d = dd.drift.rows();
    const double scale = std::max(1.0, dd.diffusion.norm());

    Matrix sigma = dd.bath;
    if (spectral_abscissa(op.closed_loop(sigma)) >= 0.0) {
        // closed loop at c·I: A + (P − cQ) K Qᵀ
        const Matrix qkq = op.q() * op.k() * op.q().transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (qkq + qkq.transpose()), Eigen::EigenvaluesOnly);
        const double lam = es.eigenvalues().minCoeff();
        if (!(lam > 0.0)) throw std::domain_error("riccati: measurement gain is not positive definite");
        const double mu = logarithmic_norm(dd.drift + op.p() * op.k() * op.q().transpose());
        double c = std::max(mu, 0.0) / lam + 1.0;
        sigma = c * Matrix::Identity(d, d);
        for (int tries = 0; tries < 60 && spectral_abscissa(op.closed_loop(sigma)) >= 0.0; ++tries) {
            c *= 2.0;
            sigma = c * Matrix::Identity(d, d);
        }
    }

    Matrix f(d, d);
    op.evaluate(sigma, f);
    double residual = f.norm();
    long it = 0;
    const double target = std::min(opts.tol, 1e-11) * scale;
    while (residual > target && it < opts.max_newton_iterations) {
        const Matrix delta = solve_continuous_lyapunov(op.closed_loop(sigma), f);
        sigma += delta;
        sigma = 0.5 * (sigma + sigma.transpose()).eval();
        op.evaluate(sigma, f);
        const double next = f.norm();
        ++it;
        if (!std::isfinite(next)) break;
        if (delta.norm() <= 1e-15 * sigma.norm() && next >= residual) {
            residual = next;
            break;
        }
        residual = next;
    }

    SteadyStateResult r{CovarianceMatrix(sigma, dd.modes), residual, SteadyStateMethod::riccati_direct, false, it, 0.0,
                        ""};
    if (!(residual / scale < opts.tol)) {
        r.diagnostic = "newton iteration stalled after " + std::to_string(it) + " iterations; relative residual " +
                       std::to_string(residual / scale) + closed_loop_note(op, sigma);
        return r;
    }
    const auto phys = check_physical(sigma);
    r.converged = phys.physical;
    if (!phys.physical)
        r.diagnostic = "steady state unphysical (min nu = " + std::to_string(phys.min_symplectic_eigenvalue) + ")";
    return r;
}

}  // namespace detail

/// Steady state of the monitored (Riccati) dynamics.
inline SteadyStateResult solve_riccati_steady(const DriftDiffusion& dd, const MeasurementMatrix& meas,
                                              const RiccatiOptions& opts = {}) {
    if (meas.sigma_m.rows() != dd.drift.rows() || meas.sigma_m.cols() != dd.drift.cols())
        throw std::invalid_argument("measurement matrix dimension does not match the dynamics");
    const detail::RiccatiOperator op(dd, meas);
    using M = RiccatiOptions::Method;
    if (opts.method == M::newton) return detail::newton_riccati(dd, op, opts);

    SteadyStateResult integrated = detail::integrate_riccati(dd, op, opts);
    if (opts.method == M::integrate) return integrated;

    const SteadyStateResult direct = detail::newton_riccati(dd, op, opts);
    if (integrated.converged && direct.converged) {
        const double gap = (integrated.sigma.matrix() - direct.sigma.matrix()).norm() /
                           integrated.sigma.matrix().norm();
        if (gap >= opts.agreement_tol) {
            integrated.converged = false;
            integrated.diagnostic = "integration and direct solutions disagree (relative gap " +
                                    std::to_string(gap) + ")";
        }
    } else if (!direct.converged) {
        integrated.converged = false;
        integrated.diagnostic += (integrated.diagnostic.empty() ? "" : "; ") + std::string("direct: ") + direct.diagnostic;
    }
    return integrated;
}

}  // namespace gausscomb
