#include <doctest.h>

#include "lindbloch/analysis.hpp"
#include "support.hpp"

using namespace lindbloch;

namespace {

Liouvillian generator(const QubitHamiltonian& H, double h1, double h2, double h3) {
    return build_generator(H, DecayRates(h1, h2, h3));
}

double distance_to_line(const Vec3& a, const Vec3& dir) { return (a - a.dot(dir) * dir).norm(); }

}  // namespace

TEST_CASE("fixed points of the worked configurations") {
    const FixedPointSet z = fixed_points(generator(QubitHamiltonian::sigma_z(5), 0, 0, 1));
    CHECK(z.kind == FixedPointKind::Line);
    REQUIRE(z.basis.size() == 1);
    CHECK((z.basis[0] - Vec3(0, 0, 1)).norm() < 1e-12);

    CHECK(fixed_points(generator(QubitHamiltonian::sigma_z(10), 1, 1, 1)).kind == FixedPointKind::OriginOnly);
    CHECK(fixed_points(generator({}, 0, 0, 0)).kind == FixedPointKind::FullSpace);
    CHECK(fixed_points(generator({}, 0, 0, 0)).basis.size() == 3);

    // Field and dephasing both along x keep the x-axis fixed.
    const FixedPointSet x = fixed_points(generator({0, 3, 0, 0}, 2, 0, 0));
    CHECK(x.kind == FixedPointKind::Line);
    CHECK(std::abs(std::abs(x.basis[0].x()) - 1) < 1e-12);

    const FixedPointSet y = fixed_points(generator({0, 0, 3, 0}, 0, 2, 0));
    CHECK(y.kind == FixedPointKind::Line);
    CHECK(std::abs(std::abs(y.basis[0].y()) - 1) < 1e-12);

    // Closed system: the fixed line is the field direction.
    const FixedPointSet field_line = fixed_points(generator({0, 1, 2, 2}, 0, 0, 0));
    CHECK(field_line.kind == FixedPointKind::Line);
    CHECK(std::abs(std::abs(field_line.basis[0].dot(Vec3(1, 2, 2) / 3)) - 1) < 1e-12);
}

TEST_CASE("property: reported fixed points are dynamically fixed") {
    testgen::Gen g(51);
    const std::vector<Liouvillian> gens = {
        generator(QubitHamiltonian::sigma_z(5), 0, 0, 1),
        generator({0, 3, 0, 0}, 2, 0, 0),
        generator({0, 0, 3, 0}, 0, 2, 0),
        generator({0, 1, 2, 2}, 0, 0, 0),
        generator({}, 0, 0, 0),
    };
    for (const Liouvillian& L : gens) {
        for (const Vec3& b : fixed_points(L).basis) {
            CHECK((L.T * b).norm() < 1e-10);
            const double s = g.uniform(-1, 1);
            for (const double t : {0.1, 1.0, 10.0})
                CHECK(testgen::max_abs_diff(propagate(L, BlochVector(s * b), t).vec(), s * b) < 1e-9);
        }
    }
}

TEST_CASE("stability of the z-channel") {
    const double w = 5, h = 1;
    const Liouvillian L = generator(QubitHamiltonian::sigma_z(w), 0, 0, h);
    const StabilityReport rep = stability(L, fixed_points(L));
    int oscillatory = 0, neutral = 0;
    for (int k = 0; k < 3; ++k) {
        const Complex z = rep.eigenvalues[k];
        if (rep.modes[k] == ModeStability::Neutral) {
            ++neutral;
            CHECK(std::abs(z) < 1e-10);
        } else {
            CHECK(rep.modes[k] == ModeStability::OscillatoryAttracting);
            ++oscillatory;
            CHECK(std::abs(z.real() + 2 * h) < 1e-10);
            CHECK(std::abs(std::abs(z.imag()) - 2 * w) < 1e-10);
        }
    }
    CHECK(oscillatory == 2);
    CHECK(neutral == 1);
}

TEST_CASE("stability of isotropic and x-axis configurations") {
    const Liouvillian iso = build_generator({}, DecayRates::isotropic(1));
    for (const ModeStability m : stability(iso, fixed_points(iso)).modes) CHECK(m == ModeStability::Attracting);

    const Liouvillian x = generator({0, 3, 0, 0}, 2, 0, 0);
    const StabilityReport rep = stability(x, fixed_points(x));
    int neutral = 0;
    for (int k = 0; k < 3; ++k)
        if (rep.modes[k] == ModeStability::Neutral) ++neutral;
    CHECK(neutral == 1);
    CHECK(std::string(to_string(ModeStability::OscillatoryAttracting)) == "oscillatory_attracting");
}

TEST_CASE("property: no mode is repelling for non-negative rates") {
    testgen::Gen g(52);
    for (int i = 0; i < 500; ++i) {
        const Liouvillian L = build_generator(g.hamiltonian(), g.rates());
        for (const ModeStability m : stability(L, fixed_points(L)).modes) CHECK(m != ModeStability::Repelling);
    }
}

TEST_CASE("property: states converge to the fixed line") {
    testgen::Gen g(53);
    struct Config {
        Liouvillian L;
        Vec3 dir;
        double slowest;
    };
    const std::vector<Config> configs = {
        {generator(QubitHamiltonian::sigma_z(5), 0, 0, 1), Vec3(0, 0, 1), 2.0},
        {generator({0, 3, 0, 0}, 2, 0, 0), Vec3(1, 0, 0), 2.0},
        {generator({0, 0, 3, 0}, 0, 2, 0), Vec3(0, 1, 0), 2.0},
    };
    for (const Config& c : configs) {
        for (int i = 0; i < 100; ++i) {
            const BlochVector a0 = g.ball_point();
            const Vec3 a = propagate(c.L, a0, 20.0 / c.slowest).vec();
            CHECK(distance_to_line(a, c.dir) < 1e-6);
            // The component along the line is conserved.
            CHECK(std::abs(a.dot(c.dir) - a0.vec().dot(c.dir)) < 1e-12);
        }
    }
}

TEST_CASE("asymptotic fit: super-critical decay rate is 1/tau_d") {
    const double w = 10, h = 50;
    const RegimeReport rep = classify_regime(QubitHamiltonian::sigma_z(w), DecayRates(h, 0, 0));
    const double tau = *rep.tau_d;
    const Trajectory tr =
        sample_trajectory(generator(QubitHamiltonian::sigma_z(w), h, 0, 0), BlochVector(1, 0, 0), 0, 10 * tau, 1001);
    const DecayFit fit = asymptotic_fit(tr, tau);
    CHECK(std::abs(fit.rate * tau - 1) < 0.01);
    CHECK(fit.r2 > 0.999);
    const DecayFit explicit_window = asymptotic_fit(tr, 5 * tau, 10 * tau);
    CHECK(explicit_window.rate == fit.rate);
}

TEST_CASE("asymptotic fit: isotropic and unitary") {
    const double h = 0.7;
    const Trajectory iso =
        sample_trajectory(build_generator(QubitHamiltonian::sigma_z(3), DecayRates::isotropic(h)), BlochVector(0.5, 0.2, 0.1), 0, 2, 200);
    CHECK(std::abs(asymptotic_fit(iso).rate / (4 * h) - 1) < 1e-3);
    CHECK(std::abs(asymptotic_fit(iso, 0.1, 0.9).rate / (4 * h) - 1) < 1e-3);

    const Trajectory unitary =
        sample_trajectory(build_generator({0, 1, 2, 3}, DecayRates()), BlochVector(0.5, 0.2, 0.1), 0, 2, 200);
    CHECK(std::abs(asymptotic_fit(unitary).rate) < 1e-10);
}

TEST_CASE("asymptotic fit: errors") {
    const Trajectory tr = sample_trajectory(build_generator({}, DecayRates::isotropic(1)), BlochVector(1, 0, 0), 0, 1, 20);
    CHECK_THROWS_AS(asymptotic_fit(tr, 0.0, 0.2), InsufficientSamples);
    CHECK_THROWS_AS(asymptotic_fit(tr, 0.5, 2.0), BadRange);
    CHECK_THROWS_AS(asymptotic_fit(tr, 0.5, 0.4), BadRange);
}

TEST_CASE("EP sweep reference rows") {
    const double w = 10;
    const std::vector<double> betas = {0.5, 1.0, 2.0};
    const auto rows = ep_sweep(w, betas);
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(rows[0].lambdas[1].imag() + 2 * w * std::sqrt(0.75)) < 1e-12);
    CHECK(std::abs(rows[0].lambdas[2].imag() - 2 * w * std::sqrt(0.75)) < 1e-12);
    CHECK(std::abs(rows[0].lambdas[2].imag() - 17.320508075688775) < 1e-12);
    for (const Complex z : rows[1].lambdas) CHECK(z.imag() == 0.0);
    for (const Complex z : rows[2].lambdas) CHECK(z.imag() == 0.0);

    CHECK(rows[1].coalescence > 0.999);
    // The eigenvector overlap of the pair at beta = 0.5 is exactly beta.
    CHECK(std::abs(rows[0].coalescence - 0.5) < 1e-12);

    CHECK(!rows[0].defective);
    CHECK(rows[1].defective);
    CHECK(!rows[2].defective);

    for (const auto& r : rows)
        for (const Complex z : r.lambdas) CHECK(z.real() <= 0.0);
}

TEST_CASE("EP sweep: square-root branch exponent") {
    const auto betas = linspace(0.99, 0.9999, 100);
    const auto rows = ep_sweep(10, betas);
    // Least squares of ln|Im| against ln(1 - beta).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double x = std::log(1 - r.beta);
        const double y = std::log(std::abs(r.lambdas[2].imag()));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope - 0.5) < 0.02);
}

TEST_CASE("EP sweep: argument validation") {
    const std::vector<double> unsorted = {1.0, 0.5};
    CHECK_THROWS_AS(ep_sweep(10, unsorted), InvalidArgument);
    const std::vector<double> ok = {0.5};
    CHECK_THROWS_AS(ep_sweep(0, ok), InvalidArgument);
}

TEST_CASE("critical damping decays fastest at t = 0.5") {
    const auto norm_at = [](double beta) {
        const Liouvillian L = generator(QubitHamiltonian::sigma_z(10), 20 * beta, 0, 0);
        return propagate(L, BlochVector(1, 0, 0), 0.5).norm();
    };
    const double sub = norm_at(0.1), crit = norm_at(1.0), super = norm_at(2.5);
    CHECK(crit < sub);
    CHECK(crit < super);
}

TEST_CASE("linspace endpoints") {
    const auto v = linspace(0.5, 2.0, 4);
    REQUIRE(v.size() == 4);
    CHECK(v.front() == 0.5);
    CHECK(v[2] == 1.5);
    CHECK(v.back() == 2.0);
}
