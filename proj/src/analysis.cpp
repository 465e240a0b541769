#include "lindbloch/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace lindbloch {

const char* to_string(FixedPointKind k) {
    switch (k) {
        case FixedPointKind::OriginOnly: return "origin_only";
        case FixedPointKind::Line: return "line";
        case FixedPointKind::Plane: return "plane";
        case FixedPointKind::FullSpace: return "full_space";
    }
    return "origin_only";
}

const char* to_string(ModeStability m) {
    switch (m) {
        case ModeStability::Attracting: return "attracting";
        case ModeStability::OscillatoryAttracting: return "oscillatory_attracting";
        case ModeStability::Neutral: return "neutral";
        case ModeStability::Repelling: return "repelling";
    }
    return "neutral";
}

FixedPointSet fixed_points(const Liouvillian& L) {
    const double scale = L.T.cwiseAbs().maxCoeff();
    const SpectralData sd = eigendecompose(L);

    FixedPointSet out;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(sd.lambdas[k]) > kNullEps * scale) continue;
        // Null eigenvectors are real after phase fixing.
        Vec3 v = sd.vectors[k].real();
        for (const Vec3& b : out.basis) v -= b.dot(v) * b;
        const double n = v.norm();
        if (n > 1e-8) out.basis.push_back(v / n);
    }
    switch (out.basis.size()) {
        case 0: out.kind = FixedPointKind::OriginOnly; break;
        case 1: out.kind = FixedPointKind::Line; break;
        case 2: out.kind = FixedPointKind::Plane; break;
        default: out.kind = FixedPointKind::FullSpace; break;
    }
    return out;
}

StabilityReport stability(const Liouvillian& L, [[maybe_unused]] const FixedPointSet& fps) {
    const double eps = kNullEps * L.T.cwiseAbs().maxCoeff();
    const SpectralData sd = eigendecompose(L);
    StabilityReport rep;
    rep.eigenvalues = sd.lambdas;
    for (int k = 0; k < 3; ++k) {
        const Complex z = sd.lambdas[k];
        if (z.real() < -eps) {
            rep.modes[k] = std::abs(z.imag()) > eps ? ModeStability::OscillatoryAttracting : ModeStability::Attracting;
        } else if (z.real() <= eps) {
            rep.modes[k] = ModeStability::Neutral;
        } else {
            rep.modes[k] = ModeStability::Repelling;
        }
    }
    return rep;
}

DecayFit asymptotic_fit(const Trajectory& traj, double window_start, double window_end) {
    if (traj.times.empty() || window_start < traj.times.front() || window_end > traj.times.back() ||
        !(window_end > window_start))
        throw BadRange("fit window must lie inside the trajectory span");

    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        if (t < window_start || t > window_end) continue;
        const double n = traj.states[k].norm();
        if (!(n > 1e-300)) throw DomainError("trajectory norm vanishes inside the fit window");
        ts.push_back(t);
        ys.push_back(std::log(n));
    }
    if (ts.size() < 8) throw InsufficientSamples("fewer than 8 samples inside the fit window");

    const double m = static_cast<double>(ts.size());
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tm += ts[i];
        ym += ys[i];
    }
    tm /= m;
    ym /= m;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - tm) * (ts[i] - tm);
        sty += (ts[i] - tm) * (ys[i] - ym);
        syy += (ys[i] - ym) * (ys[i] - ym);
    }
    const double slope = sty / stt;
    DecayFit fit;
    fit.rate = -slope;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (ym + slope * (ts[i] - tm));
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

DecayFit asymptotic_fit(const Trajectory& traj, std::optional<double> tau_d) {
    if (traj.times.empty()) throw InsufficientSamples("empty trajectory");
    if (tau_d) return asymptotic_fit(traj, 5.0 * *tau_d, 10.0 * *tau_d);
    const double mid = 0.5 * (traj.times.front() + traj.times.back());
    return asymptotic_fit(traj, mid, traj.times.back());
}

std::vector<EpSweepRow> ep_sweep(double omega0, std::span<const double> betas) {
    if (!(omega0 > 0.0)) throw InvalidArgument("omega0 must be > 0");
    if (!std::is_sorted(betas.begin(), betas.end())) throw InvalidArgument("betas must be sorted");

    std::vector<EpSweepRow> rows;
    rows.reserve(betas.size());
    for (const double beta : betas) {
        if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
        const Liouvillian L =
            build_generator(QubitHamiltonian::sigma_z(omega0), DecayRates(2.0 * omega0 * beta, 0.0, 0.0));
        const SpectralData sd = eigendecompose(L);
        rows.push_back({beta, sd.lambdas, sd.coalescence, sd.defective});
    }
    return rows;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    if (n == 0) return out;
    if (n == 1) return {lo};
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    return out;
}

}  // namespace lindbloch
