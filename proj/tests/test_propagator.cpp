#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "lindbloch/propagator.hpp"
#include "support.hpp"

using namespace lindbloch;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Liouvillian sigma_z_generator(double omega0, double h1, double h2, double h3) {
    return build_generator(QubitHamiltonian::sigma_z(omega0), DecayRates(h1, h2, h3));
}

// Closed forms written out directly, independent of the library catalog.
Vec3 isotropic_x(double w, double h, double t) {
    return std::exp(-4 * h * t) * Vec3(std::cos(2 * w * t), std::sin(2 * w * t), 0);
}

Vec3 critical_x(double w, double t) {
    return std::exp(-2 * w * t) * Vec3(1 + 2 * w * t, 2 * w * t, 0);
}

Vec3 sub_critical_x(double w, double h, double t) {
    const double beta = h / (2 * w);
    const double gamma = 1 / std::sqrt(1 - beta * beta);
    const double arg = 2 * w * t / gamma;
    return std::exp(-h * t) * Vec3(std::cos(arg) + gamma * beta * std::sin(arg), gamma * std::sin(arg), 0);
}

}  // namespace

TEST_CASE("expm agrees with Eigen's matrix exponential") {
    testgen::Gen g(31);
    for (int i = 0; i < 300; ++i) {
        Mat3 A;
        const double scale = std::pow(10.0, g.uniform(-3, 2.5));
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) A(r, c) = scale * g.uniform(-1, 1);
        const Mat3 ours = expm(A);
        const Mat3 ref = A.exp();
        CHECK((ours - ref).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
    CHECK((expm(Mat3::Zero()) - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("propagate at t = 0 is the identity") {
    const BlochVector a0(0.3, -0.2, 0.5);
    const BlochVector a = propagate(sigma_z_generator(10, 1, 2, 3), a0, 0.0);
    CHECK(a.vec() == a0.vec());
    CHECK_THROWS_AS(propagate(sigma_z_generator(10, 1, 2, 3), a0, -1.0), BadRange);
}

TEST_CASE("isotropic precession matches the damped circle") {
    const Liouvillian L = sigma_z_generator(10, 1, 1, 1);
    for (const double t : {0.05, 0.1, 0.2}) {
        const Vec3 a = propagate(L, BlochVector(1, 0, 0), t).vec();
        CHECK(testgen::max_abs_diff(a, isotropic_x(10, 1, t)) < 1e-10);
    }
}

TEST_CASE("critical damping matches the polynomial-times-exponential form") {
    const Liouvillian L = sigma_z_generator(10, 20, 0, 0);
    for (int k = 0; k <= 100; ++k) {
        const double t = k / 100.0;
        const Vec3 a = propagate(L, BlochVector(1, 0, 0), t).vec();
        CHECK(a.allFinite());
        CHECK(testgen::max_abs_diff(a, critical_x(10, t)) < 1e-10);
    }
}

TEST_CASE("sample_trajectory endpoints and grid") {
    const Liouvillian L = sigma_z_generator(10, 1, 1, 1);
    const Trajectory two = sample_trajectory(L, BlochVector(1, 0, 0), 0.0, 1.0, 2);
    REQUIRE(two.size() == 2);
    CHECK(two.times[0] == 0.0);
    CHECK(two.times[1] == 1.0);
    CHECK(two.states[0].vec() == Vec3(1, 0, 0));

    CHECK_THROWS_AS(sample_trajectory(L, BlochVector(1, 0, 0), 1.0, 1.0, 10), BadRange);
    CHECK_THROWS_AS(sample_trajectory(L, BlochVector(1, 0, 0), 0.0, 1.0, 1), BadRange);
    CHECK_THROWS_AS(sample_trajectory(L, BlochVector(1, 0, 0), -1.0, 1.0, 10), BadRange);
}

TEST_CASE("sampled isotropic trajectory stays within 1e-9 of the closed form") {
    const Trajectory tr = sample_trajectory(sigma_z_generator(10, 1, 1, 1), BlochVector(1, 0, 0), 0.0, 1.0, 1001);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        worst = std::max(worst, testgen::max_abs_diff(tr.states[k].vec(), isotropic_x(10, 1, tr.times[k])));
        if (k > 0) CHECK(tr.times[k] > tr.times[k - 1]);
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("sampled states match direct propagation to 1e-12") {
    testgen::Gen g(32);
    for (int i = 0; i < 20; ++i) {
        const Liouvillian L = build_generator(g.hamiltonian(), g.rates());
        const BlochVector a0 = g.ball_point();
        const double t0 = g.uniform(0, 1);
        const Trajectory tr = sample_trajectory(L, a0, t0, t0 + 1.0, 500);
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const Vec3 direct = propagate(L, a0, tr.times[k] - t0).vec();
            worst = std::max(worst, testgen::max_abs_diff(tr.states[k].vec(), direct));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("z-channel keeps a3 constant") {
    const Trajectory tr =
        sample_trajectory(sigma_z_generator(5, 0, 0, 1), BlochVector(kInvSqrt2, 0, kInvSqrt2), 0.0, 1.0, 1001);
    for (const BlochVector& a : tr.states) CHECK(std::abs(a.a3() - kInvSqrt2) < 1e-12);
}

TEST_CASE("closed-form catalog agrees with direct formulas and with propagation") {
    struct Case {
        ClosedFormKind kind;
        double w, h;
        Liouvillian L;
        Vec3 a0;
    };
    const std::vector<Case> cases = {
        {ClosedFormKind::IsotropicX, 10, 1, sigma_z_generator(10, 1, 1, 1), Vec3(1, 0, 0)},
        {ClosedFormKind::IsotropicXZ, 10, 1, sigma_z_generator(10, 1, 1, 1), Vec3(kInvSqrt2, 0, kInvSqrt2)},
        {ClosedFormKind::AnisotropicHyperbolic, 10, 50, sigma_z_generator(10, 50, 0, 0), Vec3(1, 0, 0)},
        {ClosedFormKind::AnisotropicTrigonometric, 10, 2, sigma_z_generator(10, 2, 0, 0), Vec3(1, 0, 0)},
        {ClosedFormKind::Critical, 10, 20, sigma_z_generator(10, 20, 0, 0), Vec3(1, 0, 0)},
        {ClosedFormKind::ZChannel, 5, 1, sigma_z_generator(5, 0, 0, 1), Vec3(kInvSqrt2, 0, kInvSqrt2)},
    };
    for (const Case& c : cases) {
        const auto f = closed_form(c.kind, {c.w, c.h});
        CHECK(testgen::max_abs_diff(f(0.0).vec(), c.a0) < 1e-15);
        const double horizon = 5.0 / std::max(c.h, c.w);
        double worst = 0.0;
        for (int k = 0; k <= 1000; ++k) {
            const double t = horizon * k / 1000.0;
            worst = std::max(worst, testgen::max_abs_diff(f(t).vec(), propagate(c.L, BlochVector(c.a0), t).vec()));
        }
        CHECK(worst < 1e-9);
    }

    for (int k = 0; k <= 50; ++k) {
        const double t = k / 50.0;
        CHECK(testgen::max_abs_diff(closed_form(ClosedFormKind::IsotropicX, {10, 1})(t).vec(), isotropic_x(10, 1, t)) < 1e-14);
        CHECK(testgen::max_abs_diff(closed_form(ClosedFormKind::Critical, {10, 20})(t).vec(), critical_x(10, t)) < 1e-14);
        CHECK(testgen::max_abs_diff(closed_form(ClosedFormKind::AnisotropicTrigonometric, {10, 2})(t).vec(),
                                    sub_critical_x(10, 2, t)) < 1e-13);
        const Vec3 z = closed_form(ClosedFormKind::ZChannel, {5, 1})(t).vec();
        const Vec3 z_ref = kInvSqrt2 * Vec3(std::exp(-2 * t) * std::cos(10 * t), std::exp(-2 * t) * std::sin(10 * t), 1);
        CHECK(testgen::max_abs_diff(z, z_ref) < 1e-15);
    }
}

TEST_CASE("closed forms reject parameters outside their domain") {
    CHECK_THROWS_AS(closed_form(ClosedFormKind::AnisotropicHyperbolic, {10, 10}), RegimeMismatch);
    CHECK_THROWS_AS(closed_form(ClosedFormKind::AnisotropicTrigonometric, {10, 30}), RegimeMismatch);
    CHECK_THROWS_AS(closed_form(ClosedFormKind::Critical, {10, 21}), RegimeMismatch);
    CHECK_THROWS_AS(closed_form(ClosedFormKind::AnisotropicTrigonometric, {10, 20}), RegimeMismatch);
}

TEST_CASE("sub-critical period") {
    // beta = 0.1: tau = pi gamma / omega0 is one full turn, so a(t + tau) = e^{-h tau} a(t).
    const double gamma = 1 / std::sqrt(0.99);
    const double tau = kPi * gamma / 10;
    const auto f = closed_form(ClosedFormKind::AnisotropicTrigonometric, {10, 2});
    for (const double t : {0.0, 0.03, 0.11}) {
        const Vec3 lhs = f(t + tau).vec();
        const Vec3 rhs = std::exp(-2 * tau) * f(t).vec();
        CHECK(testgen::max_abs_diff(lhs, rhs) < 1e-13);
    }
}

TEST_CASE("hyperbolic form continued below the EP equals the trigonometric form") {
    for (const double beta : {0.1, 0.5, 0.95}) {
        const double w = 10;
        const auto trig = closed_form(ClosedFormKind::AnisotropicTrigonometric, {w, 2 * w * beta});
        double worst = 0.0, imag = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double t = 0.01 * k;
            const auto c = anisotropic_hyperbolic<std::complex<double>>(w, beta, t);
            const Vec3 re(c[0].real(), c[1].real(), c[2].real());
            worst = std::max(worst, testgen::max_abs_diff(re, trig(t).vec()));
            imag = std::max({imag, std::abs(c[0].imag()), std::abs(c[1].imag())});
        }
        CHECK(worst < 1e-10);
        CHECK(imag < 1e-10);
    }
    // Real instantiation above the EP matches the catalog entry.
    const auto hyp = closed_form(ClosedFormKind::AnisotropicHyperbolic, {10, 50});
    const auto r = anisotropic_hyperbolic<double>(10, 2.5, 0.3);
    CHECK(testgen::max_abs_diff(Vec3(r[0], r[1], r[2]), hyp(0.3).vec()) < 1e-15);
}

TEST_CASE("property: semigroup") {
    testgen::Gen g(33);
    for (int i = 0; i < 200; ++i) {
        const Liouvillian L = build_generator(g.hamiltonian(), g.rates());
        const BlochVector a0 = g.ball_point();
        const double s = g.uniform(0, 1), t = g.uniform(0, 1);
        const Vec3 two_step = propagate(L, propagate(L, a0, s), t).vec();
        const Vec3 one_step = propagate(L, a0, s + t).vec();
        CHECK(testgen::max_abs_diff(two_step, one_step) < 1e-10);
    }
}

TEST_CASE("property: linearity") {
    testgen::Gen g(34);
    for (int i = 0; i < 200; ++i) {
        const Liouvillian L = build_generator(g.hamiltonian(), g.rates());
        const BlochVector a = g.ball_point(), b = g.ball_point();
        const double alpha = g.uniform(-0.5, 0.5), beta = g.uniform(-0.5, 0.5);
        const double t = g.uniform(0, 1);
        const Vec3 lhs = propagate(L, BlochVector(alpha * a.vec() + beta * b.vec()), t).vec();
        const Vec3 rhs = alpha * propagate(L, a, t).vec() + beta * propagate(L, b, t).vec();
        CHECK(testgen::max_abs_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("property: ball contraction") {
    testgen::Gen g(35);
    for (int i = 0; i < 200; ++i) {
        const Liouvillian L = build_generator(g.hamiltonian(), g.rates());
        const BlochVector a0 = g.sphere_point();
        for (const double t : {0.01, 0.1, 1.0, 10.0}) CHECK(propagate(L, a0, t).norm() <= a0.norm() + 1e-9);
    }
}

TEST_CASE("isotropic trajectories decay monotonically in radius") {
    testgen::Gen g(36);
    for (int i = 0; i < 20; ++i) {
        const Liouvillian L = build_generator(g.hamiltonian(), DecayRates::isotropic(g.uniform(0.01, 3)));
        const Trajectory tr = sample_trajectory(L, g.ball_point(), 0, 2, 200);
        for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr.states[k].norm() <= tr.states[k - 1].norm() + 1e-9);
    }
}

TEST_CASE("spectral propagation cross-checks the exponential away from the EP") {
    testgen::Gen g(37);
    int compared = 0;
    for (int i = 0; i < 200; ++i) {
        const Liouvillian L = build_generator(g.hamiltonian(), g.rates());
        const BlochVector a0 = g.ball_point();
        const double t = g.uniform(0, 1);
        if (eigendecompose(L).coalescence >= 0.9) continue;
        ++compared;
        CHECK(testgen::max_abs_diff(propagate_spectral(L, a0, t).vec(), propagate(L, a0, t).vec()) < 1e-10);
    }
    CHECK(compared > 150);
    CHECK_THROWS_AS(propagate_spectral(sigma_z_generator(10, 20, 0, 0), BlochVector(1, 0, 0), 0.1), RegimeMismatch);
}
