#include "lindbloch/spherical_dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace lindbloch {

namespace {

using State = std::array<double, 3>;

// Dormand-Prince 5(4) tableau. The system is autonomous, so the node
// abscissae are not needed.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// PI step-size controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [coef, k] : terms)
        for (int i = 0; i < 3; ++i) out[i] += h * coef * (*k)[i];
    return out;
}

template <typename Rhs>
void dopri_step(Rhs&& f, const State& y, const State& k1, double h, State& y_new, State& k7, double& err_max) {
    const State k2 = f(axpy(y, h, {{a21, &k1}}));
    const State k3 = f(axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = f(axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f(axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f(axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    y_new = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    k7 = f(y_new);
    err_max = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        err_max = std::max(err_max, std::abs(e));
        if (!std::isfinite(y_new[i]) || !std::isfinite(e)) err_max = std::numeric_limits<double>::infinity();
    }
}

SphericalRhs rhs_unchecked(double theta, double phi, const QubitHamiltonian& H, const DecayRates& h) {
    const Complex h01 = H.h01();
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double s2t = std::sin(2.0 * theta);
    SphericalRhs out;
    out.dphi = (H.h00() - H.h11()) + (h.h2() - h.h1()) * std::sin(2.0 * phi);
    // The cot(theta) term is absent (not 0 * inf) for a diagonal Hamiltonian.
    if (h01 != Complex(0.0, 0.0))
        out.dphi -= 2.0 * (std::cos(theta) / std::sin(theta)) * (h01.real() * cp - h01.imag() * sp);
    out.dtheta = -2.0 * (h01.real() * sp + h01.imag() * cp) + s2t * (h.h1() * cp * cp + h.h2() * sp * sp - h.h3());
    out.dlogr = radial_rate(theta, phi, h);
    return out;
}

bool near_pole(double theta, double band) { return theta < band || theta > kPi - band; }

// Integration error may push the radius marginally past 1; r never grows
// under the dynamics, so project back onto the ball.
Vec3 onto_ball(const Vec3& a) {
    const double n = a.norm();
    return n > 1.0 ? Vec3(a / n) : a;
}

// Nearest continuous representative of `wrapped` to `reference`.
double unwrap_near(double wrapped, double reference) {
    return wrapped + kTwoPi * std::round((reference - wrapped) / kTwoPi);
}

}  // namespace

double radial_rate(double theta, double phi, const DecayRates& h) {
    const double st2 = std::sin(theta) * std::sin(theta);
    const double cp2 = std::cos(phi) * std::cos(phi);
    const double sp2 = std::sin(phi) * std::sin(phi);
    return -2.0 * (h.h1() * (1.0 - st2 * cp2) + h.h2() * (1.0 - st2 * sp2) + h.h3() * st2);
}

SphericalRhs spherical_rhs(const SphericalState& s, const QubitHamiltonian& H, const DecayRates& h) {
    if (near_pole(s.theta, kPoleEps) && H.h01() != Complex(0.0, 0.0))
        throw PoleSingularity("azimuthal rate diverges at a pole for a transverse Hamiltonian");
    return rhs_unchecked(s.theta, s.phi, H, h);
}

IntegrationResult integrate(const SphericalState& s0, const QubitHamiltonian& H, const DecayRates& h, double t0,
                            double t1, const IntegrationOptions& opts) {
    if (!(t1 > t0)) throw BadRange("integration requires t1 > t0");
    if (opts.samples < 2) throw BadRange("at least two samples are required");
    if (!(opts.tol >= 1e-12 && opts.tol <= 1e-3)) throw InvalidArgument("tol must lie in [1e-12, 1e-3]");
    if (!(s0.r >= 0.0 && s0.r <= 1.0 + kBallSlack)) throw BallViolation("initial radius outside [0, 1]");

    const Liouvillian L = build_generator(H, h);
    const double span = t1 - t0;
    const double h_max = span / 10.0;
    const double h_min = 1e-15 * span;

    auto spherical_f = [&](const State& y) {
        const SphericalRhs r = rhs_unchecked(y[0], y[1], H, h);
        return State{r.dtheta, r.dphi, r.dlogr};
    };
    auto cartesian_f = [&](const State& y) {
        const Vec3 d = L.T * Vec3(y[0], y[1], y[2]);
        return State{d.x(), d.y(), d.z()};
    };

    IntegrationResult res;
    res.cartesian.meta = {H, h, "spherical"};
    const std::size_t n = opts.samples;
    res.times.reserve(n);
    res.spherical.reserve(n);
    res.phi_unwrapped.reserve(n);
    res.cartesian.times.reserve(n);
    res.cartesian.states.reserve(n);

    bool cartesian = near_pole(s0.theta, kPoleSwitchEnter);
    bool collapsed = s0.r < kRadiusCollapse;
    double phi_cont = s0.phi;
    State y;
    auto load_cartesian = [&](double theta, double phi, double r) {
        y = {r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi), r * std::cos(theta)};
    };
    if (cartesian) {
        load_cartesian(s0.theta, s0.phi, s0.r);
    } else if (!collapsed) {
        y = {s0.theta, s0.phi, std::log(s0.r)};
    }

    auto record = [&](double t) {
        SphericalState s;
        Vec3 a = Vec3::Zero();
        if (collapsed) {
            s.flag = SphericalFlag::DegenerateRadius;
        } else if (cartesian) {
            a = onto_ball(Vec3(y[0], y[1], y[2]));
            s = cartesian_to_spherical(BlochVector(a));
            if (s.flag == SphericalFlag::None) phi_cont = unwrap_near(s.phi, phi_cont);
        } else {
            s.r = std::min(1.0, std::exp(y[2]));
            s.theta = y[0];
            phi_cont = y[1];
            s.phi = wrap_angle(y[1]);
            a = s.r * Vec3(std::sin(s.theta) * std::cos(s.phi), std::sin(s.theta) * std::sin(s.phi), std::cos(s.theta));
        }
        res.times.push_back(t);
        res.spherical.push_back(s);
        res.phi_unwrapped.push_back(phi_cont);
        res.cartesian.times.push_back(t);
        res.cartesian.states.push_back(BlochVector(onto_ball(a)));
    };

    auto eval = [&](const State& state) { return cartesian ? cartesian_f(state) : spherical_f(state); };

    double t = t0;
    record(t);
    State k1{};
    if (!collapsed) k1 = eval(y);
    double k1_norm = std::max({std::abs(k1[0]), std::abs(k1[1]), std::abs(k1[2]), 1e-10});
    double h_prop = std::clamp(0.5 * std::pow(opts.tol, 0.2) / k1_norm, h_min, h_max);
    double err_old = 1e-4;

    for (std::size_t k = 1; k < n; ++k) {
        const double target = k + 1 == n ? t1 : t0 + span * static_cast<double>(k) / static_cast<double>(n - 1);
        while (!collapsed && t < target) {
            const double remaining = target - t;
            const bool clamped = h_prop >= remaining;
            const double step = clamped ? remaining : h_prop;
            if (step < h_min && !clamped) throw StepUnderflow("required step below minimum step size");

            State y_new{}, k7{};
            double err_abs = 0.0;
            dopri_step(eval, y, k1, step, y_new, k7, err_abs);
            const double err = err_abs / opts.tol;

            if (err <= 1.0) {
                const double fac11 = std::pow(std::max(err, 1e-16), kExpo);
                double fac = fac11 / std::pow(err_old, kBeta);
                fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
                const double h_next = std::min(step / fac, h_max);
                h_prop = clamped ? std::max(h_prop, h_next) : h_next;
                h_prop = std::min(h_prop, h_max);
                err_old = std::max(err, 1e-4);

                t = clamped ? target : t + step;
                y = y_new;
                k1 = k7;
                ++res.accepted_steps;

                if (cartesian) {
                    const Vec3 a(y[0], y[1], y[2]);
                    const double r = a.norm();
                    if (r < kRadiusCollapse) {
                        collapsed = true;
                    } else {
                        const double theta = std::acos(std::clamp(a.z() / r, -1.0, 1.0));
                        if (!near_pole(theta, kPoleSwitchLeave)) {
                            phi_cont = unwrap_near(wrap_angle(std::atan2(a.y(), a.x())), phi_cont);
                            y = {theta, phi_cont, std::log(r)};
                            cartesian = false;
                            res.switches.push_back({t, false});
                            k1 = eval(y);
                        }
                    }
                } else {
                    if (y[2] < std::log(kRadiusCollapse)) {
                        collapsed = true;
                    } else if (near_pole(y[0], kPoleSwitchEnter)) {
                        phi_cont = y[1];
                        load_cartesian(y[0], y[1], std::exp(y[2]));
                        cartesian = true;
                        res.switches.push_back({t, true});
                        k1 = eval(y);
                    }
                }
            } else {
                const double fac11 = std::pow(err, kExpo);
                h_prop = step / std::min(1.0 / kFacMin, fac11 / kSafety);
                ++res.rejected_steps;
                if (h_prop < h_min) throw StepUnderflow("required step below minimum step size");
            }
        }
        if (collapsed) t = target;
        record(target);
    }
    res.radius_collapsed = collapsed;
    return res;
}

SphericalState diagonal_closed_form(const QubitHamiltonian& H, const DecayRates& h, const SphericalState& s0,
                                    double t, double t0) {
    constexpr double kTol = 1e-12;
    if (std::abs(H.h01()) > kTol) throw RegimeMismatch("diagonal closed form requires h01 = 0");
    if (std::abs(h.h1() - h.h2()) > kTol) throw RegimeMismatch("diagonal closed form requires h1 = h2");
    if (!(t >= t0)) throw BadRange("closed form evaluated before t0");

    const double tau = t - t0;
    const double h1 = h.h1();
    const double h3 = h.h3();
    SphericalState s;
    s.phi = wrap_angle(s0.phi + (H.h00() - H.h11()) * tau);
    if (std::abs(s0.theta - 0.5 * kPi) < kPoleEps) {
        s.theta = s0.theta;
        s.r = s0.r * std::exp(-2.0 * (h1 + h3) * tau);
        return s;
    }
    const double c0 = std::cos(s0.theta);
    const double t0sq = std::tan(s0.theta) * std::tan(s0.theta);
    s.theta = std::atan2(std::sin(s0.theta) * std::exp(-2.0 * (h3 - h1) * tau), c0);
    s.r = s0.r * std::exp(-4.0 * h1 * tau) * std::abs(c0) * std::sqrt(1.0 + t0sq * std::exp(-4.0 * (h3 - h1) * tau));
    if (near_pole(s.theta, kPoleEps)) {
        s.flag = SphericalFlag::PhiUndefined;
    }
    return s;
}

double trajectory_invariant(const SphericalState& s, double h1, double h3) {
    if (std::abs(h3 - h1) <= 1e-12) throw DomainError("invariant undefined for h3 = h1");
    if (near_pole(s.theta, kPoleEps) || std::abs(s.theta - 0.5 * kPi) < kPoleEps)
        throw DomainError("invariant undefined at theta in {0, pi/2, pi}");
    const double exponent = -2.0 * h1 / (h3 - h1);
    return s.r * std::abs(std::cos(s.theta)) * std::pow(std::abs(std::tan(s.theta)), exponent);
}

}  // namespace lindbloch
