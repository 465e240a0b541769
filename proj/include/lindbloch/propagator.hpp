#pragma once

// Exact Bloch-vector evolution a(t) = exp(T t) a0 and the catalog of
// closed-form solutions used as golden references.

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "lindbloch/liouvillian.hpp"

namespace lindbloch {

struct TrajectoryMeta {
    QubitHamiltonian hamiltonian;
    DecayRates rates;
    std::string method;
};

/// Sampled evolution: strictly increasing times, one state per time.
struct Trajectory {
    std::vector<double> times;
    std::vector<BlochVector> states;
    TrajectoryMeta meta;

    std::size_t size() const { return times.size(); }
};

/// exp(A) by scaling and squaring with a degree-13 Pade approximant.
Mat3 expm(const Mat3& A);

/// exp(T t) a0; throws BadRange for t < 0.
BlochVector propagate(const Liouvillian& L, const BlochVector& a0, double t);

/// Same evolution through the eigen-decomposition; only valid away from
/// exceptional points (throws RegimeMismatch when coalescence >= 0.9).
BlochVector propagate_spectral(const Liouvillian& L, const BlochVector& a0, double t);

/// n uniform samples on [t0, t1], stepping with exp(T dt) and re-anchoring
/// to a full exponential every kReanchorInterval steps.
Trajectory sample_trajectory(const Liouvillian& L, const BlochVector& a0, double t0, double t1, std::size_t n);

inline constexpr std::size_t kReanchorInterval = 64;

enum class ClosedFormKind {
    IsotropicX,                // a0 = (1,0,0), H = omega0 s3, h1 = h2 = h3 = h
    IsotropicXZ,               // a0 = (1,0,1)/sqrt2, same generator
    AnisotropicHyperbolic,     // a0 = (1,0,0), H = omega0 s3, h = (h,0,0), beta > 1
    AnisotropicTrigonometric,  // same, beta < 1
    Critical,                  // same, beta = 1
    ZChannel,                  // a0 = (1,0,1)/sqrt2, H = omega0 s3, h = (0,0,h)
};

struct ClosedFormParams {
    double omega0 = 0.0;
    double h = 0.0;
};

/// Evaluable closed-form solution; throws RegimeMismatch outside its domain.
std::function<BlochVector(double)> closed_form(ClosedFormKind kind, const ClosedFormParams& p);

/// Anisotropic solution for a0 = (1,0,0) written with cosh/sinh of
/// 2 omega0 t / gamma_tilde. Instantiating with std::complex continues it
/// analytically to beta < 1, where it must coincide with the cos/sin form.
template <typename Scalar>
std::array<Scalar, 3> anisotropic_hyperbolic(double omega0, double beta, double t) {
    using std::cosh;
    using std::sinh;
    using std::sqrt;
    const Scalar root = sqrt(Scalar(beta * beta - 1.0));  // 1 / gamma_tilde
    const Scalar gt = Scalar(1.0) / root;
    const double h = 2.0 * omega0 * beta;
    const Scalar arg = Scalar(2.0 * omega0 * t) * root;
    const Scalar damp = Scalar(std::exp(-h * t));
    return {damp * (cosh(arg) + gt * Scalar(beta) * sinh(arg)), gt * damp * sinh(arg), Scalar(0.0)};
}

}  // namespace lindbloch
