#pragma once

// Real 3x3 Bloch generator T_d of the Pauli-channel GKSL equation,
// its spectral data and the damping-regime classification.

#include <array>
#include <optional>

#include "lindbloch/state_space.hpp"

namespace lindbloch {

using Vec3c = Eigen::Vector3cd;
using Mat3c = Eigen::Matrix3cd;

/// Threshold on |beta - 1| for the critical label.
inline constexpr double kCriticalEps = 1e-10;
/// Coalescence above which a spectrum is flagged as near an exceptional point.
inline constexpr double kNearEpCoalescence = 0.99;

/// da/dt = T a with T = -2 (D_r - e_x).
struct Liouvillian {
    Mat3 T = Mat3::Zero();
    QubitHamiltonian hamiltonian;
    DecayRates rates;
};

struct SpectralData {
    /// Real eigenvalue first, then the conjugate pair ordered by Im ascending;
    /// three real eigenvalues are sorted ascending.
    std::array<Complex, 3> lambdas{};
    /// Unit vectors, first non-negligible component real positive.
    std::array<Vec3c, 3> vectors{};
    /// max_{i != j} |<v_i, v_j>|: 0 for orthogonal modes, 1 at an exceptional point.
    double coalescence = 0.0;
    /// 2-norm condition number of the eigenvector matrix (infinite when defective).
    double condition = 1.0;
    /// Geometric multiplicity below algebraic multiplicity for some eigenvalue.
    bool defective = false;
    bool near_ep_warning = false;
    /// True when the shifted-QR fallback produced the eigenvalues.
    bool used_fallback = false;
};

enum class Regime { SubCritical, Critical, SuperCritical, NotApplicable };

struct RegimeReport {
    Regime regime = Regime::NotApplicable;
    double beta = 0.0;                  // h / (2 omega0)
    std::optional<double> gamma;        // 1/sqrt(1 - beta^2), sub-critical
    std::optional<double> gamma_tilde;  // 1/sqrt(beta^2 - 1), super-critical
    std::optional<double> tau_d;        // (beta + sqrt(beta^2 - 1)) / (2 omega0)
    std::optional<double> period;       // pi gamma / omega0
};

const char* to_string(Regime r);

Liouvillian build_generator(const QubitHamiltonian& H, const DecayRates& h);

/// -i[H, rho] + sum_k h_k (s_k rho s_k - rho), evaluated with 2x2 matrix
/// products only. Independent of build_generator.
Mat2c gksl_rhs_oracle(const DensityMatrix& rho, const QubitHamiltonian& H, const DecayRates& h);

/// Spectral data of T. Throws SolverFailure when no route reaches the residual tolerance.
SpectralData eigendecompose(const Liouvillian& L);
SpectralData eigendecompose(const Mat3& T);

RegimeReport classify_regime(const QubitHamiltonian& H, const DecayRates& h);

/// Skew matrix with skew(e) a = e x a.
Mat3 skew(const Vec3& e);

}  // namespace lindbloch
