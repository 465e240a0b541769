#pragma once

// Nonlinear dynamics of the Bloch vector in (theta, phi, ln r): right-hand
// side, adaptive integration with a Cartesian chart near the poles, the
// diagonal-Hamiltonian closed form and its trajectory invariant.

#include <vector>

#include "lindbloch/propagator.hpp"

namespace lindbloch {

struct SphericalRhs {
    double dphi = 0.0;    // rad / time
    double dtheta = 0.0;  // rad / time
    double dlogr = 0.0;   // 1 / time, never positive for non-negative rates
};

/// Throws PoleSingularity when theta is within kPoleEps of a pole and h01 != 0.
SphericalRhs spherical_rhs(const SphericalState& s, const QubitHamiltonian& H, const DecayRates& h);

/// r'/r as a function of orientation only.
double radial_rate(double theta, double phi, const DecayRates& h);

/// Poles closer than this switch the integrator to Cartesian coordinates.
inline constexpr double kPoleSwitchEnter = 1e-3;
/// Distance from the pole required to switch back (hysteresis).
inline constexpr double kPoleSwitchLeave = 2e-3;
/// Radius at which the state is pinned to the origin.
inline constexpr double kRadiusCollapse = 1e-14;

struct ChartSwitch {
    double time = 0.0;
    bool to_cartesian = true;
};

struct IntegrationOptions {
    double tol = 1e-9;
    std::size_t samples = 1001;
};

struct IntegrationResult {
    std::vector<double> times;
    /// r, theta and phi in [0, 2pi) at each sample.
    std::vector<SphericalState> spherical;
    /// Continuous azimuth (no wrapping) at each sample.
    std::vector<double> phi_unwrapped;
    /// Cartesian image of every sample.
    Trajectory cartesian;
    std::vector<ChartSwitch> switches;
    bool radius_collapsed = false;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of (theta, phi, ln r) with PI
/// step control, sampled at `samples` uniform times on [t0, t1]. The initial
/// state is taken at t0. Throws BadRange, InvalidArgument (tol outside
/// [1e-12, 1e-3]) or StepUnderflow.
IntegrationResult integrate(const SphericalState& s0, const QubitHamiltonian& H, const DecayRates& h, double t0,
                            double t1, const IntegrationOptions& opts = {});

/// Closed-form state at time t for diagonal H and h1 = h2 (t0 = 0 by default).
/// Throws RegimeMismatch when the preconditions fail beyond 1e-12.
SphericalState diagonal_closed_form(const QubitHamiltonian& H, const DecayRates& h, const SphericalState& s0,
                                    double t, double t0 = 0.0);

/// r |cos theta| |tan theta|^(-2 h1 / (h3 - h1)), conserved along diagonal-H
/// trajectories with h1 = h2. Throws DomainError for h3 = h1 or theta in {0, pi/2, pi}.
double trajectory_invariant(const SphericalState& s, double h1, double h3);

}  // namespace lindbloch
