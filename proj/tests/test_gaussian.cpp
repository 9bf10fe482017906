#include "test_support.hpp"

#include <gausscomb/channels.hpp>
#include <gausscomb/covariance_io.hpp>
#include <gausscomb/lyapunov.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

using namespace gausscomb;
using gausscomb::testing::random_physical_state;
using gausscomb::testing::random_symplectic;
using gausscomb::testing::tms_state;

TEST(ModeSet, SymmetricOrderAndLookup) {
    const ModeSet m = ModeSet::symmetric(5);
    ASSERT_EQ(m.size(), 6u);
    EXPECT_EQ(m.to_string(), "-1,1,-3,3,-5,5");
    EXPECT_EQ(m.position(-3), 2u);
    EXPECT_EQ(m.position(5), 5u);
    EXPECT_FALSE(m.contains(7));
    EXPECT_EQ(m.max_abs_frequency(), 5);
    EXPECT_THROW(m.position(7), std::out_of_range);
}

TEST(ModeSet, RejectsEvenAndDuplicateLabels) {
    EXPECT_THROW(ModeSet::from_frequencies({1, 2}), std::invalid_argument);
    EXPECT_THROW(ModeSet::from_frequencies({1, -1, 1}), std::invalid_argument);
    EXPECT_NO_THROW(ModeSet({{1, 0}, {1, 3}}));
    EXPECT_THROW(ModeSet::symmetric(4), std::invalid_argument);
}

TEST(ModeSet, LabelTextRoundTrip) {
    for (ModeLabel l : {ModeLabel{-7, 0}, ModeLabel{3, 4}, ModeLabel{43, 0}})
        EXPECT_EQ(parse_mode_label(to_string(l)), l);
    EXPECT_THROW(parse_mode_label("1x"), std::invalid_argument);
    EXPECT_THROW(parse_mode_label("@2"), std::invalid_argument);
}

TEST(Symplectic, FormIdentities) {
    const Matrix omega = symplectic_form(3);
    EXPECT_TRUE((omega * omega + Matrix::Identity(6, 6)).isZero(0.0));
    EXPECT_TRUE((omega.transpose() + omega).isZero(0.0));
    EXPECT_THROW(symplectic_form(0), std::invalid_argument);
}

TEST(Symplectic, RandomGeneratorPreservesForm) {
    std::mt19937_64 rng(1);
    const Matrix s = random_symplectic(rng, 3, 0.4);
    const Matrix omega = symplectic_form(3);
    EXPECT_LT((s * omega * s.transpose() - omega).norm(), 1e-10);
}

TEST(Symplectic, VacuumAndThermalSpectra) {
    const Vector vac = symplectic_eigenvalues(Matrix::Identity(6, 6));
    EXPECT_TRUE(vac.isApproxToConstant(1.0, 1e-12));

    Matrix thermal = Matrix::Zero(4, 4);
    thermal.diagonal() << 3.0, 3.0, 5.0, 5.0;
    const Vector nu = symplectic_eigenvalues(thermal);
    EXPECT_NEAR(nu(0), 3.0, 1e-12);
    EXPECT_NEAR(nu(1), 5.0, 1e-12);
}

TEST(Symplectic, SpectrumInvariantUnderSymplecticMaps) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix sigma = random_physical_state(rng, 3);
        const Matrix s = random_symplectic(rng, 3, 0.3);
        const Vector a = symplectic_eigenvalues(sigma);
        const Vector b = symplectic_eigenvalues(s * sigma * s.transpose());
        EXPECT_LT((a - b).norm(), 1e-8 * a.norm());
        EXPECT_TRUE(check_physical(sigma).physical);
    }
}

TEST(Physicality, DetectsUncertaintyViolation) {
    const Matrix squeezed_too_far = 0.5 * Matrix::Identity(4, 4);
    const auto r = check_physical(squeezed_too_far);
    EXPECT_FALSE(r.physical);
    EXPECT_NEAR(r.min_symplectic_eigenvalue, 0.5, 1e-12);
    EXPECT_THROW(log_negativity(squeezed_too_far), std::domain_error);
}

TEST(Covariance, ConstructionChecks) {
    EXPECT_THROW(CovarianceMatrix(Matrix::Identity(4, 4), ModeSet::symmetric(3)), std::invalid_argument);
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.1;
    EXPECT_THROW(CovarianceMatrix(asym, ModeSet::from_frequencies({1})), std::invalid_argument);
}

TEST(Metrics, VacuumHasNoEntanglementAndUnitPurity) {
    const auto m = log_negativity(Matrix::Identity(4, 4));
    EXPECT_EQ(m.log_negativity, 0.0);
    EXPECT_NEAR(m.purity, 1.0, 1e-14);
    EXPECT_NEAR(m.nu_tilde_minus, 1.0, 1e-12);
}

TEST(Metrics, TwoModeSqueezedVacuumOracle) {
    for (double r : {0.05, 0.3, 0.7, 1.2}) {
        const auto m = log_negativity(tms_state(r));
        EXPECT_NEAR(m.nu_tilde_minus, std::exp(-2.0 * r), 1e-10);
        EXPECT_NEAR(m.log_negativity, 2.0 * r / std::numbers::ln2, 1e-9);
        EXPECT_NEAR(m.purity, 1.0, 1e-10);
    }
}

TEST(Metrics, ThermalProductStatePurity) {
    Matrix sigma = Matrix::Zero(4, 4);
    sigma.diagonal() << 2.0, 2.0, 4.0, 4.0;
    const auto m = log_negativity(sigma);
    EXPECT_EQ(m.log_negativity, 0.0);
    EXPECT_NEAR(m.purity, 1.0 / 8.0, 1e-14);
}

TEST(Metrics, ClosedFormAgreesWithSpectrumOnRandomStates) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const Matrix sigma = random_physical_state(rng, 2, 0.6);
        const double spectral = pt_symplectic_min(sigma);
        const double closed = pt_closed_form_min(sigma);
        ASSERT_NEAR(spectral, closed, 1e-8 * std::max(1.0, spectral)) << "trial " << trial;
    }
}

TEST(Metrics, InvariantUnderLocalSymplectics) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix sigma = random_physical_state(rng, 2, 0.5);
        Matrix local = Matrix::Zero(4, 4);
        local.block<2, 2>(0, 0) = random_symplectic(rng, 1, 0.5);
        local.block<2, 2>(2, 2) = random_symplectic(rng, 1, 0.5);
        const auto a = log_negativity(sigma);
        const auto b = log_negativity(Matrix(local * sigma * local.transpose()));
        EXPECT_NEAR(a.log_negativity, b.log_negativity, 1e-8);
        EXPECT_NEAR(a.purity, b.purity, 1e-8);
    }
}

TEST(PartialTrace, ExtractsBlocksBitExactly) {
    std::mt19937_64 rng(5);
    const ModeSet modes = ModeSet::symmetric(5);
    const CovarianceMatrix sigma(random_physical_state(rng, 6), modes);
    const CovarianceMatrix r = partial_trace(sigma, std::vector<int>{3, -1});
    EXPECT_EQ(r.modes().to_string(), "-1,3");
    const Eigen::Index a = 0, b = 2 * static_cast<Eigen::Index>(modes.position(3));
    EXPECT_TRUE((r.matrix().block<2, 2>(0, 0) == sigma.matrix().block<2, 2>(a, a)));
    EXPECT_TRUE((r.matrix().block<2, 2>(0, 2) == sigma.matrix().block<2, 2>(a, b)));
    EXPECT_TRUE((r.matrix().block<2, 2>(2, 2) == sigma.matrix().block<2, 2>(b, b)));
    EXPECT_THROW(partial_trace(sigma, std::vector<int>{1, 7}), std::invalid_argument);
    EXPECT_THROW(partial_trace(sigma, std::vector<int>{1, 1}), std::invalid_argument);
}

TEST(PartialTrace, PurityOfReducedTmsIsMixed) {
    const CovarianceMatrix sigma(tms_state(0.5), ModeSet::from_frequencies({-1, 1}));
    const double c = std::cosh(1.0);
    EXPECT_NEAR(purity(partial_trace(sigma, std::vector<int>{1})), 1.0 / c, 1e-12);
}

TEST(CovarianceIo, RoundTripIsExact) {
    std::mt19937_64 rng(6);
    const CovarianceMatrix sigma(random_physical_state(rng, 3), ModeSet({{-1, 0}, {1, 0}, {3, 4}}));
    const CovarianceMatrix back = covariance_from_string(covariance_to_string(sigma));
    EXPECT_TRUE(back.matrix() == sigma.matrix());
    EXPECT_EQ(back.modes(), sigma.modes());
}

TEST(CovarianceIo, RejectsMalformedText) {
    EXPECT_THROW(covariance_from_string("n_modes=1 labels=1\n1 0\n0\n"), std::invalid_argument);
    EXPECT_THROW(covariance_from_string("garbage\n"), std::invalid_argument);
    EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
}

TEST(Channels, AttenuatorIsCompletelyPositiveAndKeepsVacuum) {
    for (double theta : {0.0, 0.3, std::numbers::pi / 4, 1.4}) {
        const auto ch = attenuator_channel(theta, 1.0, 2);
        EXPECT_TRUE(is_completely_positive(ch));
        EXPECT_TRUE(ch.apply(Matrix::Identity(4, 4)).isIdentity(1e-14));
    }
    const auto hot = attenuator_channel(0.5, 3.0, 1);
    EXPECT_TRUE(is_completely_positive(hot));
    EXPECT_THROW(attenuator_channel(std::numbers::pi / 2, 1.0, 1), std::invalid_argument);
    EXPECT_THROW(attenuator_channel(0.1, 0.5, 1), std::invalid_argument);
}

TEST(Channels, DualMapMovesMeasurementNoiseThroughTheChannel) {
    // heterodyne of ch(σ) with noise σ_m, rescaled by X⁻¹, equals σ measured with dual(σ_m)
    const auto ch = attenuator_channel(0.7, 2.0, 2);
    const auto dual = dual_map(ch);
    std::mt19937_64 rng(7);
    const Matrix sigma = random_physical_state(rng, 2);
    const Matrix sigma_m = random_physical_state(rng, 2);
    const Matrix xinv = ch.x.inverse();
    const Matrix lhs = xinv * (ch.apply(sigma) + sigma_m) * xinv.transpose();
    EXPECT_LT((lhs - (sigma + dual.apply(sigma_m))).norm(), 1e-12 * lhs.norm());
}

TEST(Channels, EffectiveMeasurementClosedForm) {
    EXPECT_TRUE(effective_measurement(0.0, 1.0, 3).sigma_m.isIdentity(1e-15));
    // cos⁻²(π/3) + 2 tan²(π/3) = 4 + 6
    const auto m = effective_measurement(std::numbers::pi / 3, 2.0, 1);
    EXPECT_NEAR(m.sigma_m(0, 0), 10.0, 1e-12);
    EXPECT_NEAR(m.sigma_m(0, 1), 0.0, 1e-15);
}

TEST(Lyapunov, ScalarCase) {
    Matrix a(1, 1), q(1, 1);
    a << -0.5;
    q << 2.0;
    EXPECT_NEAR(solve_continuous_lyapunov(a, q)(0, 0), 2.0, 1e-14);
}

TEST(Lyapunov, MatchesKroneckerSolve) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    const int n = 6;
    Matrix a(n, n), q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a(i, j) = g(rng);
            q(i, j) = g(rng);
        }
    a -= (spectral_abscissa(a) + 0.5) * Matrix::Identity(n, n);
    q = q * q.transpose();

    // (I ⊗ A + A ⊗ I) vec X = −vec Q
    Matrix big = Matrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            big.block(i * n, j * n, n, n) += a(i, j) * Matrix::Identity(n, n);
            if (i == j) big.block(i * n, i * n, n, n) += a;
        }
    const Vector vx = big.fullPivLu().solve(-Eigen::Map<const Vector>(q.data(), n * n));
    const Matrix expected = Eigen::Map<const Matrix>(vx.data(), n, n);
    const Matrix x = solve_continuous_lyapunov(a, q);
    EXPECT_LT((x - expected).norm(), 1e-10 * expected.norm());
    EXPECT_LT((a * x + x * a.transpose() + q).norm(), 1e-10 * q.norm());
}

TEST(Lyapunov, LogarithmicNormBoundsAbscissa) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    Matrix a(5, 5);
    for (int i = 0; i < 25; ++i) a.data()[i] = g(rng);
    EXPECT_LE(spectral_abscissa(a), logarithmic_norm(a) + 1e-12);
}
