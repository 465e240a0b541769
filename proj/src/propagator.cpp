#include "lindbloch/propagator.hpp"

#include <cmath>

#include <Eigen/LU>

namespace lindbloch {

namespace {

// Pade [13/13] coefficients and the matching 1-norm bound (Higham 2005).
constexpr double kPade13[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                670442572800.0,      33522128640.0,       1323241920.0,
                                40840800.0,          960960.0,            16380.0,
                                182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

void require_regime(bool ok, const char* what) {
    if (!ok) throw RegimeMismatch(what);
}

}  // namespace

Mat3 expm(const Mat3& A) {
    if (!A.allFinite()) throw SolverFailure("matrix exponential of a non-finite matrix");
    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
    const Mat3 S = A / std::ldexp(1.0, squarings);

    const Mat3 I = Mat3::Identity();
    const Mat3 S2 = S * S;
    const Mat3 S4 = S2 * S2;
    const Mat3 S6 = S4 * S2;
    const double* b = kPade13;
    const Mat3 U = S * (S6 * (b[13] * S6 + b[11] * S4 + b[9] * S2) + b[7] * S6 + b[5] * S4 + b[3] * S2 + b[1] * I);
    const Mat3 V = S6 * (b[12] * S6 + b[10] * S4 + b[8] * S2) + b[6] * S6 + b[4] * S4 + b[2] * S2 + b[0] * I;
    Mat3 R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < squarings; ++k) R = R * R;
    if (!R.allFinite()) throw SolverFailure("matrix exponential overflowed");
    return R;
}

BlochVector propagate(const Liouvillian& L, const BlochVector& a0, double t) {
    if (!(t >= 0.0)) throw BadRange("propagation time must be >= 0");
    if (t == 0.0) return a0;
    return BlochVector(Vec3(expm(L.T * t) * a0.vec()));
}

BlochVector propagate_spectral(const Liouvillian& L, const BlochVector& a0, double t) {
    if (!(t >= 0.0)) throw BadRange("propagation time must be >= 0");
    const SpectralData sd = eigendecompose(L);
    if (sd.defective || sd.coalescence >= 0.9)
        throw RegimeMismatch("spectral propagation requested near an exceptional point");
    Mat3c V;
    Eigen::Vector3cd growth;
    for (int k = 0; k < 3; ++k) {
        V.col(k) = sd.vectors[k];
        growth[k] = std::exp(sd.lambdas[k] * t);
    }
    const Vec3c coeffs = V.partialPivLu().solve(a0.vec().cast<Complex>());
    const Vec3c a = V * growth.cwiseProduct(coeffs);
    return BlochVector(Vec3(a.real()));
}

Trajectory sample_trajectory(const Liouvillian& L, const BlochVector& a0, double t0, double t1, std::size_t n) {
    if (!(t0 >= 0.0) || !(t1 > t0)) throw BadRange("sample range requires t1 > t0 >= 0");
    if (n < 2) throw BadRange("at least two samples are required");

    Trajectory traj;
    traj.meta = {L.hamiltonian, L.rates, "exact"};
    traj.times.reserve(n);
    traj.states.reserve(n);

    const double span = t1 - t0;
    const double dt = span / static_cast<double>(n - 1);
    const Mat3 step = expm(L.T * dt);
    Vec3 a = a0.vec();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = k + 1 == n ? t1 : t0 + span * static_cast<double>(k) / static_cast<double>(n - 1);
        if (k % kReanchorInterval == 0) {
            a = k == 0 ? a0.vec() : Vec3(expm(L.T * (t - t0)) * a0.vec());
        } else {
            a = step * a;
        }
        traj.times.push_back(t);
        traj.states.emplace_back(a);
    }
    return traj;
}

std::function<BlochVector(double)> closed_form(ClosedFormKind kind, const ClosedFormParams& p) {
    const double w = p.omega0;
    const double h = p.h;
    require_regime(std::isfinite(w) && std::isfinite(h) && h >= 0.0, "closed form needs finite omega0 and h >= 0");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    switch (kind) {
        case ClosedFormKind::IsotropicX:
            return [w, h](double t) {
                const double d = std::exp(-4.0 * h * t);
                return BlochVector(d * std::cos(2.0 * w * t), d * std::sin(2.0 * w * t), 0.0);
            };
        case ClosedFormKind::IsotropicXZ:
            return [w, h, inv_sqrt2](double t) {
                const double d = std::exp(-4.0 * h * t) * inv_sqrt2;
                return BlochVector(d * std::cos(2.0 * w * t), d * std::sin(2.0 * w * t), d);
            };
        case ClosedFormKind::AnisotropicHyperbolic: {
            require_regime(w > 0.0, "anisotropic form needs omega0 > 0");
            const double beta = h / (2.0 * w);
            require_regime(beta > 1.0 + kCriticalEps, "cosh/sinh form requires beta > 1");
            return [w, beta](double t) {
                const auto a = anisotropic_hyperbolic<double>(w, beta, t);
                return BlochVector(a[0], a[1], a[2]);
            };
        }
        case ClosedFormKind::AnisotropicTrigonometric: {
            require_regime(w > 0.0, "anisotropic form needs omega0 > 0");
            const double beta = h / (2.0 * w);
            require_regime(beta < 1.0 - kCriticalEps, "cos/sin form requires beta < 1");
            const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
            return [w, h, beta, gamma](double t) {
                const double d = std::exp(-h * t);
                const double arg = 2.0 * w * t / gamma;
                return BlochVector(d * (std::cos(arg) + beta * gamma * std::sin(arg)), gamma * d * std::sin(arg), 0.0);
            };
        }
        case ClosedFormKind::Critical: {
            require_regime(w > 0.0, "critical form needs omega0 > 0");
            require_regime(std::abs(h / (2.0 * w) - 1.0) <= kCriticalEps, "critical form requires h = 2 omega0");
            return [w](double t) {
                const double x = 2.0 * w * t;
                const double d = std::exp(-x);
                return BlochVector(d * (1.0 + x), d * x, 0.0);
            };
        }
        case ClosedFormKind::ZChannel:
            return [w, h, inv_sqrt2](double t) {
                const double d = std::exp(-2.0 * h * t) * inv_sqrt2;
                return BlochVector(d * std::cos(2.0 * w * t), d * std::sin(2.0 * w * t), inv_sqrt2);
            };
    }
    throw RegimeMismatch("unknown closed-form kind");
}

}  // namespace lindbloch
