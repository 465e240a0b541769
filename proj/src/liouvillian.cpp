#include "lindbloch/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace lindbloch {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Tolerances below are in units of max|T_ij|.
constexpr double kResidualTol = 1e-10;
constexpr double kResidualTolNearEp = 1e-7;
constexpr double kNearEpGap = 1e-2;
constexpr double kRankTol = 1e-7;
constexpr int kQrIterations = 50;

enum class RootPattern { Distinct, Double, Triple };

struct Roots {
    std::array<Complex, 3> z{};
    RootPattern pattern = RootPattern::Distinct;
};

Complex cubic(Complex z, double b, double c, double d) { return ((z + b) * z + c) * z + d; }
Complex cubic_prime(Complex z, double b, double c) { return (3.0 * z + 2.0 * b) * z + c; }

Complex newton_polish(Complex z, double b, double c, double d) {
    for (int it = 0; it < 3; ++it) {
        const Complex f = cubic(z, b, c, d);
        const Complex fp = cubic_prime(z, b, c);
        if (std::abs(fp) < 1e-8) break;
        const Complex next = z - f / fp;
        if (!(std::abs(cubic(next, b, c, d)) < std::abs(f))) break;
        z = next;
    }
    return z;
}

void sort_real_ascending(std::array<Complex, 3>& z) {
    std::sort(z.begin(), z.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
}

// Roots of det(lambda I - A) for a real matrix with max|A_ij| = 1, by
// Cardano's formula with the trigonometric branch for three real roots.
Roots cubic_roots(const Mat3& A) {
    const double b = -A.trace();
    const double c = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0) + A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0) +
                     A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
    const double d = -A.determinant();

    const double shift = -b / 3.0;
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    // Rounding-level error bounds on p, q and the discriminant.
    const double tol_p = 64.0 * kEps * (std::abs(c) + b * b / 3.0 + 1.0);
    const double tol_q = 64.0 * kEps * (2.0 * std::abs(b * b * b) / 27.0 + std::abs(b * c) / 3.0 + std::abs(d) + 1.0);
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    const double tol_disc = std::abs(q) * tol_q + p * p * tol_p / 9.0 + 64.0 * kEps * (0.25 * q * q + std::abs(p * p * p) / 27.0);

    Roots out;
    if (std::abs(p) <= tol_p && std::abs(q) <= tol_q) {
        out.z = {shift, shift, shift};
        out.pattern = RootPattern::Triple;
        return out;
    }
    if (std::abs(disc) <= tol_disc && std::abs(p) > tol_p) {
        const double simple = 3.0 * q / p + shift;
        const double dbl = -1.5 * q / p + shift;
        out.z = {newton_polish(simple, b, c, d).real(), dbl, dbl};
        sort_real_ascending(out.z);
        out.pattern = RootPattern::Double;
        return out;
    }
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-0.5 * q - std::copysign(sq, q));
        const double v = u != 0.0 ? -p / (3.0 * u) : 0.0;
        const double real_root = u + v + shift;
        const Complex pair(-0.5 * (u + v) + shift, 0.5 * std::sqrt(3.0) * std::abs(u - v));
        const double r = newton_polish(real_root, b, c, d).real();
        Complex z = newton_polish(pair, b, c, d);
        z = Complex(z.real(), std::abs(z.imag()));
        out.z = {r, std::conj(z), z};
        return out;
    }
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double ang = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
        const double t = m * std::cos(ang - 2.0 * kPi * k / 3.0) + shift;
        out.z[k] = newton_polish(t, b, c, d).real();
    }
    sort_real_ascending(out.z);
    return out;
}

// Shifted QR iteration on the full 3x3 matrix with Wilkinson shifts and
// deflation of the trailing row.
Roots qr_roots(const Mat3& A) {
    Eigen::MatrixXcd H = A.cast<Complex>();
    std::array<Complex, 3> eig{};
    int n = 3;
    int iterations = 0;
    while (n > 1 && iterations < kQrIterations) {
        const double off = H.block(n - 1, 0, 1, n - 1).cwiseAbs().maxCoeff();
        const double diag_scale = std::abs(H(n - 1, n - 1)) + std::abs(H(n - 2, n - 2)) + 1e-300;
        if (off <= kEps * diag_scale || off <= 1e-300) {
            eig[n - 1] = H(n - 1, n - 1);
            --n;
            H.conservativeResize(n, n);
            continue;
        }
        const Complex a = H(n - 2, n - 2), b = H(n - 2, n - 1), c = H(n - 1, n - 2), d = H(n - 1, n - 1);
        const Complex tr = a + d, det = a * d - b * c;
        const Complex disc = std::sqrt(tr * tr - 4.0 * det);
        const Complex mu1 = 0.5 * (tr + disc), mu2 = 0.5 * (tr - disc);
        Complex mu = std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
        // Exceptional shift to break cycles.
        if (iterations % 11 == 10) mu += Complex(0.0, off);
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(H - mu * I);
        const Eigen::MatrixXcd Q = qr.householderQ();
        const Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
        H = R * Q + mu * I;
        ++iterations;
    }
    for (int i = 0; i < n; ++i) eig[i] = H(i, i);

    // Restore exact structure of a real spectrum: one real root and either a
    // conjugate pair or two more real roots.
    std::sort(eig.begin(), eig.end(), [](Complex x, Complex y) { return std::abs(x.imag()) < std::abs(y.imag()); });
    Roots out;
    const double real0 = eig[0].real();
    if (std::abs(eig[2].imag()) > 1e-12) {
        const Complex pair = 0.5 * (eig[1] + std::conj(eig[2]));
        const Complex upper(pair.real(), std::abs(pair.imag()));
        out.z = {real0, std::conj(upper), upper};
        return out;
    }
    out.z = {real0, eig[1].real(), eig[2].real()};
    sort_real_ascending(out.z);
    for (int i = 0; i < 2; ++i) {
        if (std::abs(out.z[i] - out.z[i + 1]) < 1e-9) {
            const double avg = 0.5 * (out.z[i].real() + out.z[i + 1].real());
            out.z[i] = out.z[i + 1] = avg;
            out.pattern = RootPattern::Double;
        }
    }
    if (out.z[0] == out.z[2]) out.pattern = RootPattern::Triple;
    return out;
}

Vec3c fix_phase(Vec3c v) {
    v /= v.norm();
    for (int i = 0; i < 3; ++i) {
        const double m = std::abs(v[i]);
        if (m > 1e-12) {
            v *= std::conj(v[i]) / m;
            v[i] = m;
            break;
        }
    }
    return v;
}

// Eigenvector of a simple eigenvalue: largest bilinear cross product of two
// rows of A - lambda I, refined by one inverse-iteration step.
Vec3c simple_vector(const Mat3& A, Complex lambda) {
    const Mat3c M = A.cast<Complex>() - lambda * Mat3c::Identity();
    Vec3c best = Vec3c::Zero();
    double best_norm = -1.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const Vec3c ri = M.row(i).transpose();
            const Vec3c rj = M.row(j).transpose();
            // Plain bilinear cross product; Eigen's cross conjugates complex input.
            const Vec3c c(ri[1] * rj[2] - ri[2] * rj[1], ri[2] * rj[0] - ri[0] * rj[2], ri[0] * rj[1] - ri[1] * rj[0]);
            const double n = c.norm();
            if (n > best_norm) {
                best_norm = n;
                best = c;
            }
        }
    }
    if (!(best_norm > 0.0)) return Vec3c(1.0, 0.0, 0.0);
    Vec3c v = best / best_norm;

    const Complex shifted = lambda + Complex(1e-14, 0.0);
    const Mat3c Ms = A.cast<Complex>() - shifted * Mat3c::Identity();
    const Vec3c x = Ms.partialPivLu().solve(v);
    if (x.allFinite() && x.norm() > 0.0) {
        const Vec3c refined = x / x.norm();
        const double r_old = (M * v).norm();
        const double r_new = (M * refined).norm();
        if (r_new <= r_old) v = refined;
    }
    if (lambda.imag() == 0.0) {
        // Real eigenvalue: the eigenvector is real up to a global phase.
        v = fix_phase(v);
        Vec3c re = v.real().cast<Complex>();
        if (re.norm() > 0.0) v = re;
    }
    return fix_phase(v);
}

struct Assembled {
    std::array<Vec3c, 3> vectors;
    bool defective = false;
};

Assembled assemble_vectors(const Mat3& A, const Roots& roots) {
    Assembled out;
    int i = 0;
    while (i < 3) {
        int j = i + 1;
        while (j < 3 && roots.z[j] == roots.z[i]) ++j;
        const int mult = j - i;
        if (mult == 1) {
            out.vectors[i] = simple_vector(A, roots.z[i]);
        } else {
            // Repeated real eigenvalue: null space of A - lambda I via SVD.
            const Mat3 M = A - roots.z[i].real() * Mat3::Identity();
            Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            int null_dim = 0;
            for (int k = 0; k < 3; ++k)
                if (sv[k] <= kRankTol) ++null_dim;
            null_dim = std::max(null_dim, 1);
            const Mat3 V = svd.matrixV();
            for (int k = 0; k < mult; ++k) {
                const int col = 3 - null_dim + std::min(k, null_dim - 1);
                out.vectors[i + k] = fix_phase(V.col(col).cast<Complex>());
            }
            if (null_dim < mult) out.defective = true;
        }
        i = j;
    }
    return out;
}

double max_residual(const Mat3& A, const std::array<Complex, 3>& z, const std::array<Vec3c, 3>& v) {
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        const Vec3c r = A.cast<Complex>() * v[k] - z[k] * v[k];
        worst = std::max(worst, r.norm() / v[k].norm());
    }
    return worst;
}

double min_gap(const std::array<Complex, 3>& z) {
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (z[i] != z[j]) gap = std::min(gap, std::abs(z[i] - z[j]));
    return gap;
}

bool acceptable(const Mat3& A, double scale, const Roots& roots, const Assembled& asmb) {
    const double limit = (min_gap(roots.z) < kNearEpGap || roots.pattern != RootPattern::Distinct)
                             ? kResidualTolNearEp
                             : kResidualTol;
    // Residual is measured in units of T, so rescale the normalized residual.
    const double res = max_residual(A, roots.z, asmb.vectors) * scale;
    return std::isfinite(res) && res <= limit * std::max(1.0, scale);
}

}  // namespace

const char* to_string(Regime r) {
    switch (r) {
        case Regime::SubCritical: return "sub_critical";
        case Regime::Critical: return "critical";
        case Regime::SuperCritical: return "super_critical";
        case Regime::NotApplicable: return "not_applicable";
    }
    return "not_applicable";
}

Mat3 skew(const Vec3& e) {
    Mat3 m;
    m << 0.0, -e.z(), e.y(),
         e.z(), 0.0, -e.x(),
         -e.y(), e.x(), 0.0;
    return m;
}

Liouvillian build_generator(const QubitHamiltonian& H, const DecayRates& h) {
    const Vec3 dr(h.h2() + h.h3(), h.h1() + h.h3(), h.h1() + h.h2());
    Mat3 D = dr.asDiagonal();
    Liouvillian L;
    L.T = -2.0 * (D - skew(H.field()));
    L.hamiltonian = H;
    L.rates = h;
    return L;
}

Mat2c gksl_rhs_oracle(const DensityMatrix& rho, const QubitHamiltonian& H, const DecayRates& h) {
    const Complex i(0.0, 1.0);
    const Mat2c& r = rho.matrix();
    const Mat2c Hm = H.matrix();
    Mat2c out = -i * (Hm * r - r * Hm);
    for (int k = 1; k <= 3; ++k) {
        const Mat2c s = pauli(k);
        out += h[k - 1] * (s * r * s - r);
    }
    return out;
}

SpectralData eigendecompose(const Liouvillian& L) { return eigendecompose(L.T); }

SpectralData eigendecompose(const Mat3& T) {
    SpectralData out;
    const double scale = T.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale)) throw SolverFailure("generator has non-finite entries");
    if (scale == 0.0) {
        out.lambdas = {0.0, 0.0, 0.0};
        for (int k = 0; k < 3; ++k) out.vectors[k] = Vec3c::Unit(k);
        return out;
    }
    const Mat3 A = T / scale;

    Roots roots = cubic_roots(A);
    Assembled asmb = assemble_vectors(A, roots);
    if (!acceptable(A, scale, roots, asmb)) {
        roots = qr_roots(A);
        asmb = assemble_vectors(A, roots);
        out.used_fallback = true;
        if (!acceptable(A, scale, roots, asmb))
            throw SolverFailure("eigenvector residual above tolerance after QR fallback");
    }

    for (int k = 0; k < 3; ++k) out.lambdas[k] = roots.z[k] * scale;
    out.vectors = asmb.vectors;
    out.defective = asmb.defective;

    double coalescence = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            coalescence = std::max(coalescence, std::abs(out.vectors[i].dot(out.vectors[j])));
    out.coalescence = std::min(coalescence, 1.0);
    out.near_ep_warning = out.coalescence > kNearEpCoalescence;

    if (out.defective) {
        out.condition = std::numeric_limits<double>::infinity();
    } else {
        Mat3c V;
        for (int k = 0; k < 3; ++k) V.col(k) = out.vectors[k];
        Eigen::JacobiSVD<Mat3c> svd(V);
        const auto& sv = svd.singularValues();
        out.condition = sv[2] > 0.0 ? std::max(1.0, sv[0] / sv[2]) : std::numeric_limits<double>::infinity();
    }
    return out;
}

RegimeReport classify_regime(const QubitHamiltonian& H, const DecayRates& h) {
    constexpr double kZero = 1e-12;
    RegimeReport rep;
    const bool matches = h.h1() > kZero && h.h2() <= kZero && h.h3() <= kZero && std::abs(H.e1) <= kZero &&
                         std::abs(H.e2) <= kZero && std::abs(H.e3) > kZero;
    if (!matches) return rep;

    const double omega0 = std::abs(H.e3);
    rep.beta = h.h1() / (2.0 * omega0);
    if (std::abs(rep.beta - 1.0) <= kCriticalEps) {
        rep.regime = Regime::Critical;
    } else if (rep.beta < 1.0) {
        rep.regime = Regime::SubCritical;
        rep.gamma = 1.0 / std::sqrt(1.0 - rep.beta * rep.beta);
        rep.period = kPi * *rep.gamma / omega0;
    } else {
        rep.regime = Regime::SuperCritical;
        const double root = std::sqrt(rep.beta * rep.beta - 1.0);
        rep.gamma_tilde = 1.0 / root;
        rep.tau_d = (rep.beta + root) / (2.0 * omega0);
    }
    return rep;
}

}  // namespace lindbloch
