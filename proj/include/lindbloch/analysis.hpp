#pragma once

// Fixed points and their stability, long-time decay-rate extraction and the
// exceptional-point sweep of the anisotropic generator.

#include <optional>
#include <span>
#include <vector>

#include "lindbloch/propagator.hpp"

namespace lindbloch {

/// Relative threshold (to max|T_ij|) for treating an eigenvalue as zero.
inline constexpr double kNullEps = 1e-10;

enum class FixedPointKind { OriginOnly, Line, Plane, FullSpace };

/// ker(T) intersected with the ball, as an orthonormal basis.
struct FixedPointSet {
    FixedPointKind kind = FixedPointKind::OriginOnly;
    std::vector<Vec3> basis;
};

enum class ModeStability { Attracting, OscillatoryAttracting, Neutral, Repelling };

struct StabilityReport {
    std::array<Complex, 3> eigenvalues{};
    std::array<ModeStability, 3> modes{};
};

struct DecayFit {
    double rate = 0.0;  // minus the slope of ln|a(t)|
    double r2 = 1.0;
};

struct EpSweepRow {
    double beta = 0.0;
    std::array<Complex, 3> lambdas{};
    double coalescence = 0.0;
    bool defective = false;
};

const char* to_string(FixedPointKind k);
const char* to_string(ModeStability m);

FixedPointSet fixed_points(const Liouvillian& L);

/// The system is linear, so the Jacobian at every fixed point is T itself.
StabilityReport stability(const Liouvillian& L, const FixedPointSet& fps);

/// Least-squares fit of ln|a(t)| over samples with t in [window_start, window_end].
/// Throws InsufficientSamples with fewer than 8 samples in the window.
DecayFit asymptotic_fit(const Trajectory& traj, double window_start, double window_end);

/// Default window: [5 tau_d, 10 tau_d] when tau_d is known, else the last half.
DecayFit asymptotic_fit(const Trajectory& traj, std::optional<double> tau_d = std::nullopt);

/// Anisotropic generator (H = omega0 s3, h = (2 omega0 beta, 0, 0)) at each beta.
/// Throws InvalidArgument for omega0 <= 0 or unsorted betas.
std::vector<EpSweepRow> ep_sweep(double omega0, std::span<const double> betas);

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace lindbloch
