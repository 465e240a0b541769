#pragma once

// Qubit state representations: Bloch vector, density matrix, spherical
// coordinates, plus the Hamiltonian and decay-rate parameter types.

#include <complex>
#include <numbers>

#include <Eigen/Core>

#include "lindbloch/errors.hpp"

namespace lindbloch {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;

/// Slack allowed outside the unit ball for numerically integrated states.
inline constexpr double kBallSlack = 1e-9;
/// Below this distance from a pole the azimuth is not identifiable.
inline constexpr double kPoleEps = 1e-8;
/// Radius below which the spherical chart is degenerate.
inline constexpr double kDegenerateRadius = 1e-12;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Point of the closed Bloch ball. Construction rejects |a| > 1 + kBallSlack.
class BlochVector {
public:
    BlochVector() = default;
    BlochVector(double a1, double a2, double a3);
    explicit BlochVector(const Vec3& a);

    double a1() const { return a_.x(); }
    double a2() const { return a_.y(); }
    double a3() const { return a_.z(); }
    double norm() const { return a_.norm(); }
    const Vec3& vec() const { return a_; }

    /// Copy rescaled onto the sphere when |a| lies in (1, 1 + kBallSlack].
    BlochVector clamped_to_ball() const;

private:
    Vec3 a_ = Vec3::Zero();
};

/// Hermitian, unit-trace, positive semidefinite 2x2 matrix.
class DensityMatrix {
public:
    /// Maximally mixed state.
    DensityMatrix();
    /// Validates the matrix; throws InvalidDensity.
    explicit DensityMatrix(const Mat2c& m);

    const Mat2c& matrix() const { return m_; }
    Complex operator()(int i, int j) const { return m_(i, j); }

private:
    Mat2c m_;
};

enum class SphericalFlag {
    None,
    DegenerateRadius,  // r below kDegenerateRadius: theta and phi set to 0
    PhiUndefined,      // theta within kPoleEps of a pole: phi set to 0
};

/// Bloch-ball coordinates (r, theta, phi). Conversions keep phi in [0, 2pi).
struct SphericalState {
    double r = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    SphericalFlag flag = SphericalFlag::None;
};

struct SpectralDecomposition {
    double p1 = 0.5;
    double p2 = 0.5;
    Vec2c u1 = Vec2c(1.0, 0.0);
    Vec2c u2 = Vec2c(0.0, 1.0);
    double r = 0.0;
    bool degenerate = true;
};

/// H = e0*1 + e1*s1 + e2*s2 + e3*s3, in units of 1/time (hbar = 1).
struct QubitHamiltonian {
    double e0 = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;

    static QubitHamiltonian sigma_z(double omega0) { return {0.0, 0.0, 0.0, omega0}; }

    Vec3 field() const { return {e1, e2, e3}; }
    double h00() const { return e0 + e3; }
    double h11() const { return e0 - e3; }
    Complex h01() const { return {e1, -e2}; }
    Mat2c matrix() const;
};

/// Non-negative Pauli-channel dissipation strengths (1/time).
class DecayRates {
public:
    DecayRates() = default;
    /// Throws InvalidArgument if any rate is negative or not finite.
    DecayRates(double h1, double h2, double h3);

    static DecayRates isotropic(double h) { return {h, h, h}; }

    double h1() const { return h_[0]; }
    double h2() const { return h_[1]; }
    double h3() const { return h_[2]; }
    double operator[](int k) const { return h_[k]; }
    double max() const;

private:
    double h_[3] = {0.0, 0.0, 0.0};
};

/// Pauli matrix sigma_k for k in {1, 2, 3}.
Mat2c pauli(int k);

/// rho = (1 + a . sigma) / 2.
DensityMatrix bloch_to_density(const BlochVector& a);
/// a_i = Tr(sigma_i rho).
BlochVector density_to_bloch(const DensityMatrix& rho);
/// Tr(sigma_i m) for an arbitrary 2x2 matrix (derivatives, traceless operators).
Vec3 pauli_components(const Mat2c& m);

SphericalState cartesian_to_spherical(const BlochVector& a);
BlochVector spherical_to_cartesian(const SphericalState& s);

/// r = p1 - p2 = 2 p1 - 1.
double purity_radius(const DensityMatrix& rho);
/// Entropy in nats of a state with Bloch radius r; throws DomainError outside [0, 1 + kBallSlack].
double von_neumann_entropy(double r);
SpectralDecomposition density_spectral(const DensityMatrix& rho);

/// Wraps an angle into [0, 2pi).
double wrap_angle(double phi);

}  // namespace lindbloch
