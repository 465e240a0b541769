#include "lindbloch/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lindbloch {

namespace {

constexpr double kDensityTol = 1e-12;
const Complex kI{0.0, 1.0};

void check_ball(const Vec3& a) {
    const double n = a.norm();
    if (!std::isfinite(n) || n > 1.0 + kBallSlack) {
        throw BallViolation("Bloch vector norm " + std::to_string(n) + " exceeds 1");
    }
}

// x ln x with the 0 ln 0 = 0 convention
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Rotates the global phase so the first component with non-negligible
// magnitude is real and positive.
Vec2c fix_phase(Vec2c u) {
    for (int i = 0; i < 2; ++i) {
        const double m = std::abs(u[i]);
        if (m > 1e-14) {
            u *= std::conj(u[i]) / m;
            u[i] = m;
            break;
        }
    }
    return u;
}

}  // namespace

BlochVector::BlochVector(double a1, double a2, double a3) : a_(a1, a2, a3) { check_ball(a_); }

BlochVector::BlochVector(const Vec3& a) : a_(a) { check_ball(a_); }

BlochVector BlochVector::clamped_to_ball() const {
    const double n = norm();
    if (n > 1.0) return BlochVector(Vec3(a_ / n));
    return *this;
}

DensityMatrix::DensityMatrix() : m_(Mat2c::Identity() * 0.5) {}

DensityMatrix::DensityMatrix(const Mat2c& m) : m_(m) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                throw InvalidDensity("density matrix has non-finite entries");
    if (std::abs(m(1, 0) - std::conj(m(0, 1))) > kDensityTol)
        throw InvalidDensity("density matrix is not Hermitian");
    for (int i = 0; i < 2; ++i) {
        if (std::abs(m(i, i).imag()) > kDensityTol)
            throw InvalidDensity("density matrix has complex diagonal");
        const double d = m(i, i).real();
        if (d < -kBallSlack || d > 1.0 + kBallSlack)
            throw InvalidDensity("density matrix diagonal outside [0, 1]");
    }
    const Complex tr = m.trace();
    if (std::abs(tr - 1.0) > kDensityTol)
        throw InvalidDensity("density matrix trace differs from 1");
    const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    if (det < -kDensityTol)
        throw InvalidDensity("density matrix is not positive semidefinite");
}

Mat2c QubitHamiltonian::matrix() const {
    Mat2c h;
    h << h00(), h01(), std::conj(h01()), h11();
    return h;
}

DecayRates::DecayRates(double h1, double h2, double h3) : h_{h1, h2, h3} {
    for (int k = 0; k < 3; ++k) {
        if (!std::isfinite(h_[k]) || h_[k] < 0.0)
            throw InvalidArgument("decay[" + std::to_string(k) + "] must be >= 0");
    }
}

double DecayRates::max() const { return std::max({h_[0], h_[1], h_[2]}); }

Mat2c pauli(int k) {
    Mat2c s;
    switch (k) {
        case 1: s << 0.0, 1.0, 1.0, 0.0; break;
        case 2: s << 0.0, -kI, kI, 0.0; break;
        case 3: s << 1.0, 0.0, 0.0, -1.0; break;
        default: throw InvalidArgument("Pauli index must be 1, 2 or 3");
    }
    return s;
}

DensityMatrix bloch_to_density(const BlochVector& a) {
    Mat2c rho = 0.5 * (Mat2c::Identity() + a.a1() * pauli(1) + a.a2() * pauli(2) + a.a3() * pauli(3));
    return DensityMatrix(rho);
}

Vec3 pauli_components(const Mat2c& m) {
    // Tr(s1 m) = m01 + m10, Tr(s2 m) = i(m01 - m10), Tr(s3 m) = m00 - m11
    return {(m(0, 1) + m(1, 0)).real(), (kI * (m(0, 1) - m(1, 0))).real(), (m(0, 0) - m(1, 1)).real()};
}

BlochVector density_to_bloch(const DensityMatrix& rho) {
    return BlochVector(pauli_components(rho.matrix()));
}

double wrap_angle(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

SphericalState cartesian_to_spherical(const BlochVector& a) {
    SphericalState s;
    s.r = a.norm();
    if (s.r < kDegenerateRadius) {
        s.flag = SphericalFlag::DegenerateRadius;
        return s;
    }
    s.theta = std::acos(std::clamp(a.a3() / s.r, -1.0, 1.0));
    if (s.theta < kPoleEps || s.theta > kPi - kPoleEps) {
        s.flag = SphericalFlag::PhiUndefined;
        return s;
    }
    s.phi = wrap_angle(std::atan2(a.a2(), a.a1()));
    return s;
}

BlochVector spherical_to_cartesian(const SphericalState& s) {
    const double st = std::sin(s.theta);
    return BlochVector(s.r * st * std::cos(s.phi), s.r * st * std::sin(s.phi), s.r * std::cos(s.theta));
}

double purity_radius(const DensityMatrix& rho) {
    const Mat2c& m = rho.matrix();
    const double d = (m(0, 0) - m(1, 1)).real();
    return std::min(1.0, std::sqrt(d * d + 4.0 * std::norm(m(0, 1))));
}

double von_neumann_entropy(double r) {
    if (!(r >= 0.0 && r <= 1.0 + kBallSlack))
        throw DomainError("entropy radius must lie in [0, 1]");
    r = std::min(r, 1.0);
    const double p = 0.5 * (1.0 + r);
    const double q = 0.5 * (1.0 - r);
    return -xlogx(p) - xlogx(q);
}

SpectralDecomposition density_spectral(const DensityMatrix& rho) {
    const Vec3 a = pauli_components(rho.matrix());
    const double r = std::min(1.0, a.norm());

    SpectralDecomposition out;
    out.r = r;
    out.p1 = 0.5 * (1.0 + r);
    out.p2 = 0.5 * (1.0 - r);
    out.degenerate = out.p1 - out.p2 < 1e-12;
    if (out.degenerate) return out;

    // Eigenvector of n.sigma for eigenvalue +1, picking the better
    // conditioned of the two equivalent closed forms.
    const Vec3 n = a / a.norm();
    Vec2c u;
    if (n.z() >= 0.0) {
        u << Complex(1.0 + n.z(), 0.0), Complex(n.x(), n.y());
    } else {
        u << Complex(n.x(), -n.y()), Complex(1.0 - n.z(), 0.0);
    }
    out.u1 = fix_phase(u / u.norm());
    out.u2 << -std::conj(out.u1[1]), std::conj(out.u1[0]);
    return out;
}

}  // namespace lindbloch
