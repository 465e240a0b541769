#include "lindbloch/cli_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace lindbloch::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) fail(where.empty() ? "unknown key '" + key + "'" : "unknown key '" + where + "." + key + "'");
    }
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(field + " must be finite");
    return v;
}

std::array<double, 3> triple(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) fail(field + " must be an array of 3 numbers");
    std::array<double, 3> out{};
    for (std::size_t k = 0; k < 3; ++k) out[k] = number(j[k], field + "[" + std::to_string(k) + "]");
    return out;
}

const json& required(const json& obj, const std::string& key, const std::string& field) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(field + " is required");
    return *it;
}

Method parse_method(const json& j) {
    if (!j.is_string()) fail("method must be one of \"exact\", \"spherical\", \"both\"");
    const std::string s = j.get<std::string>();
    if (s == "exact") return Method::Exact;
    if (s == "spherical") return Method::Spherical;
    if (s == "both") return Method::Both;
    fail("method must be one of \"exact\", \"spherical\", \"both\"");
}

const char* method_name(Method m) {
    switch (m) {
        case Method::Exact: return "exact";
        case Method::Spherical: return "spherical";
        case Method::Both: return "both";
    }
    return "exact";
}

double unwrap_near(double wrapped, double reference) {
    return wrapped + kTwoPi * std::round((reference - wrapped) / kTwoPi);
}

long long winding_of(double phi_cont) { return static_cast<long long>(std::floor(phi_cont / kTwoPi)); }

// JSON emitter with %.17g floats and insertion-ordered keys.
void dump(const ordered_json& j, std::string& out) {
    switch (j.type()) {
        case ordered_json::value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                out += ordered_json(key).dump();
                out += ':';
                dump(value, out);
            }
            out += '}';
            break;
        }
        case ordered_json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump(j[i], out);
            }
            out += ']';
            break;
        }
        case ordered_json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? fmt17(x) : "null";
            break;
        }
        default: out += j.dump(); break;
    }
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json complex_pair(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path);
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << contents;
    f.flush();
    if (!f) throw IoError("failed writing " + path);
}

std::string sidecar_json(const RunConfig& cfg, const SimulationTable& table, double tol) {
    ordered_json meta;
    meta["method"] = method_name(cfg.method);
    meta["hamiltonian"] = {{"e", {cfg.hamiltonian.e1, cfg.hamiltonian.e2, cfg.hamiltonian.e3}}, {"e0", cfg.hamiltonian.e0}};
    meta["decay"] = {cfg.decay.h1(), cfg.decay.h2(), cfg.decay.h3()};
    meta["time"] = {{"t0", cfg.time->t0}, {"t1", cfg.time->t1}, {"samples", cfg.time->samples}};
    meta["tol"] = tol;
    meta["columns"] = table.discrepancy.empty()
                          ? ordered_json::array({"t", "a1", "a2", "a3", "r", "theta", "phi", "winding", "entropy"})
                          : ordered_json::array({"t", "a1", "a2", "a3", "r", "theta", "phi", "winding", "entropy",
                                                 "discrepancy"});
    meta["chart_switches"] = table.chart_switches;
    meta["radius_collapsed"] = table.radius_collapsed;
    std::string out;
    dump(meta, out);
    out += '\n';
    return out;
}

}  // namespace

std::string fmt17(double x) {
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RunConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("config must be a JSON object");
    reject_unknown_keys(j, {"hamiltonian", "decay", "initial", "time", "method", "tol", "seed"}, "");

    RunConfig cfg;
    const json& ham = required(j, "hamiltonian", "hamiltonian");
    if (!ham.is_object()) fail("hamiltonian must be an object");
    reject_unknown_keys(ham, {"e", "e0"}, "hamiltonian");
    const auto e = triple(required(ham, "e", "hamiltonian.e"), "hamiltonian.e");
    cfg.hamiltonian = {0.0, e[0], e[1], e[2]};
    if (ham.contains("e0")) cfg.hamiltonian.e0 = number(ham["e0"], "hamiltonian.e0");

    const auto h = triple(required(j, "decay", "decay"), "decay");
    for (int k = 0; k < 3; ++k)
        if (h[k] < 0.0) fail("decay[" + std::to_string(k) + "] must be ≥ 0");
    cfg.decay = DecayRates(h[0], h[1], h[2]);

    if (j.contains("initial")) {
        const json& init = j["initial"];
        if (!init.is_object()) fail("initial must be an object");
        reject_unknown_keys(init, {"bloch", "spherical"}, "initial");
        const bool has_bloch = init.contains("bloch");
        const bool has_sph = init.contains("spherical");
        if (has_bloch == has_sph) fail("initial must contain exactly one of bloch, spherical");
        if (has_bloch) {
            const auto a = triple(init["bloch"], "initial.bloch");
            const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
            if (n > 1.0 + kBallSlack) fail("initial.bloch must lie inside the unit ball");
            cfg.initial_bloch = BlochVector(a[0], a[1], a[2]).clamped_to_ball();
        } else {
            const auto s = triple(init["spherical"], "initial.spherical");
            if (s[0] < 0.0 || s[0] > 1.0 + kBallSlack) fail("initial.spherical[0] (r) must lie in [0, 1]");
            if (s[1] < 0.0 || s[1] > kPi) fail("initial.spherical[1] (theta) must lie in [0, pi]");
            cfg.initial_spherical = SphericalState{std::min(s[0], 1.0), s[1], wrap_angle(s[2]), SphericalFlag::None};
        }
    }

    if (j.contains("time")) {
        const json& tj = j["time"];
        if (!tj.is_object()) fail("time must be an object");
        reject_unknown_keys(tj, {"t0", "t1", "samples"}, "time");
        TimeGrid grid;
        grid.t0 = number(required(tj, "t0", "time.t0"), "time.t0");
        grid.t1 = number(required(tj, "t1", "time.t1"), "time.t1");
        const json& samples = required(tj, "samples", "time.samples");
        if (!samples.is_number_integer()) fail("time.samples must be an integer");
        const long long n = samples.get<long long>();
        if (grid.t0 < 0.0) fail("time.t0 must be ≥ 0");
        if (!(grid.t1 > grid.t0)) fail("time.t1 must be > time.t0");
        if (n < 2) fail("time.samples must be ≥ 2");
        grid.samples = static_cast<std::size_t>(n);
        cfg.time = grid;
    }

    if (j.contains("method")) cfg.method = parse_method(j["method"]);
    if (j.contains("tol")) {
        const double tol = number(j["tol"], "tol");
        if (tol < 1e-12 || tol > 1e-3) fail("tol must lie in [1e-12, 1e-3]");
        cfg.tol = tol;
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) fail("seed must be an integer");
        cfg.seed = j["seed"].get<long long>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

double resolve_tolerance(const RunConfig& cfg, std::optional<double> flag, const char* env_value) {
    auto check = [](double tol, const std::string& source) {
        if (!(tol >= 1e-12 && tol <= 1e-3)) fail(source + " must lie in [1e-12, 1e-3]");
        return tol;
    };
    if (flag) return check(*flag, "--tol");
    if (cfg.tol) return *cfg.tol;
    if (env_value && *env_value) {
        char* end = nullptr;
        const double v = std::strtod(env_value, &end);
        if (end == env_value || *end != '\0') fail("LINDBLOCH_TOL must be a number");
        return check(v, "LINDBLOCH_TOL");
    }
    return kDefaultTol;
}

SimulationTable simulate(const RunConfig& cfg, double tol) {
    if (!cfg.initial_bloch && !cfg.initial_spherical) fail("initial is required for simulate");
    if (!cfg.time) fail("time is required for simulate");
    const TimeGrid& grid = *cfg.time;

    const BlochVector a0 = cfg.initial_bloch ? *cfg.initial_bloch : spherical_to_cartesian(*cfg.initial_spherical).clamped_to_ball();
    const SphericalState s0 = cfg.initial_spherical ? *cfg.initial_spherical : cartesian_to_spherical(a0);
    const Liouvillian L = build_generator(cfg.hamiltonian, cfg.decay);

    SimulationTable table;
    const std::size_t n = grid.samples;

    std::optional<IntegrationResult> sph;
    if (cfg.method != Method::Exact) {
        sph = integrate(s0, cfg.hamiltonian, cfg.decay, grid.t0, grid.t1, {tol, n});
        table.chart_switches = sph->switches.size();
        table.radius_collapsed = sph->radius_collapsed;
    }

    if (cfg.method == Method::Spherical) {
        table.trajectory = sph->cartesian;
        table.times = sph->times;
        for (std::size_t k = 0; k < n; ++k) {
            table.states.push_back(sph->cartesian.states[k]);
            table.theta.push_back(sph->spherical[k].theta);
            table.phi.push_back(sph->spherical[k].phi);
            table.winding.push_back(winding_of(sph->phi_unwrapped[k]));
        }
    } else {
        table.trajectory = sample_trajectory(L, a0, grid.t0, grid.t1, n);
        table.times = table.trajectory.times;
        double phi_cont = s0.phi;
        for (std::size_t k = 0; k < n; ++k) {
            const BlochVector a = table.trajectory.states[k].clamped_to_ball();
            const SphericalState s = cartesian_to_spherical(a);
            if (s.flag == SphericalFlag::None) phi_cont = unwrap_near(s.phi, phi_cont);
            table.states.push_back(a);
            table.theta.push_back(s.theta);
            table.phi.push_back(s.phi);
            table.winding.push_back(winding_of(phi_cont));
        }
        if (cfg.method == Method::Both) {
            for (std::size_t k = 0; k < n; ++k)
                table.discrepancy.push_back(
                    (table.states[k].vec() - sph->cartesian.states[k].vec()).cwiseAbs().maxCoeff());
        }
    }
    table.trajectory.meta.method = method_name(cfg.method);
    for (const BlochVector& a : table.states) table.entropy.push_back(von_neumann_entropy(std::min(1.0, a.norm())));
    return table;
}

void write_csv(const SimulationTable& table, std::ostream& out) {
    const bool both = !table.discrepancy.empty();
    out << "t,a1,a2,a3,r,theta,phi,winding,entropy" << (both ? ",discrepancy" : "") << '\n';
    for (std::size_t k = 0; k < table.times.size(); ++k) {
        const BlochVector& a = table.states[k];
        out << fmt17(table.times[k]) << ',' << fmt17(a.a1()) << ',' << fmt17(a.a2()) << ',' << fmt17(a.a3()) << ','
            << fmt17(a.norm()) << ',' << fmt17(table.theta[k]) << ',' << fmt17(table.phi[k]) << ','
            << table.winding[k] << ',' << fmt17(table.entropy[k]);
        if (both) out << ',' << fmt17(table.discrepancy[k]);
        out << '\n';
    }
}

Plane parse_plane(std::string_view s) {
    if (s == "xy") return Plane::XY;
    if (s == "xz") return Plane::XZ;
    if (s == "yz") return Plane::YZ;
    fail("plane must be one of xy, xz, yz");
}

std::string svg_string(const Trajectory& traj, Plane plane) {
    if (traj.states.empty()) throw InvalidArgument("cannot render an empty trajectory");
    auto project = [plane](const BlochVector& a) -> std::pair<double, double> {
        switch (plane) {
            case Plane::XY: return {a.a1(), a.a2()};
            case Plane::XZ: return {a.a1(), a.a3()};
            case Plane::YZ: return {a.a2(), a.a3()};
        }
        return {a.a1(), a.a2()};
    };

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" width=\"440\" height=\"440\">\n"
      << "  <g transform=\"scale(1,-1)\">\n"
      << "    <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#888888\" stroke-width=\"0.01\"/>\n";
    if (traj.states.size() > 1) {
        s << "    <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"0.008\" points=\"";
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            const auto [x, y] = project(traj.states[k]);
            s << (k ? " " : "") << fmt17(x) << ',' << fmt17(y);
        }
        s << "\"/>\n";
    }
    const auto [x0, y0] = project(traj.states.front());
    s << "    <circle class=\"start\" cx=\"" << fmt17(x0) << "\" cy=\"" << fmt17(y0)
      << "\" r=\"0.03\" fill=\"#d62728\"/>\n";
    if (traj.states.size() > 1) {
        const auto [x1, y1] = project(traj.states.back());
        s << "    <circle class=\"end\" cx=\"" << fmt17(x1) << "\" cy=\"" << fmt17(y1)
          << "\" r=\"0.03\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"0.01\"/>\n";
    }
    s << "  </g>\n</svg>\n";
    return s.str();
}

void render_svg(const Trajectory& traj, Plane plane, const std::string& path) { write_file(path, svg_string(traj, plane)); }

std::string spectrum_report(const RunConfig& cfg) {
    const Liouvillian L = build_generator(cfg.hamiltonian, cfg.decay);
    const SpectralData sd = eigendecompose(L);
    const RegimeReport regime = classify_regime(cfg.hamiltonian, cfg.decay);
    const FixedPointSet fps = fixed_points(L);
    const StabilityReport stab = stability(L, fps);

    ordered_json rep;
    ordered_json gen = ordered_json::array();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) gen.push_back(L.T(i, j));
    rep["generator"] = gen;
    rep["eigenvalues"] = ordered_json::array();
    for (const Complex z : sd.lambdas) rep["eigenvalues"].push_back(complex_pair(z));
    rep["regime"] = to_string(regime.regime);
    rep["beta"] = regime.regime == Regime::NotApplicable ? ordered_json(nullptr) : ordered_json(regime.beta);
    rep["gamma"] = optional_number(regime.gamma);
    rep["gamma_tilde"] = optional_number(regime.gamma_tilde);
    rep["tau_d"] = optional_number(regime.tau_d);
    rep["period"] = optional_number(regime.period);
    rep["coalescence"] = sd.coalescence;
    rep["defective"] = sd.defective;
    rep["near_ep_warning"] = sd.near_ep_warning;
    rep["condition"] = sd.condition;
    rep["fixed_points"] = {{"kind", to_string(fps.kind)}, {"basis", ordered_json::array()}};
    for (const Vec3& b : fps.basis) rep["fixed_points"]["basis"].push_back({b.x(), b.y(), b.z()});
    rep["stability"] = ordered_json::array();
    for (int k = 0; k < 3; ++k)
        rep["stability"].push_back({{"eigenvalue", complex_pair(stab.eigenvalues[k])}, {"class", to_string(stab.modes[k])}});

    std::string out;
    dump(rep, out);
    return out;
}

void write_sweep_csv(const std::vector<EpSweepRow>& rows, std::ostream& out) {
    out << "beta,re_l1,re_l2,re_l3,im_l1,im_l2,im_l3,coalescence,defective\n";
    for (const EpSweepRow& r : rows) {
        out << fmt17(r.beta);
        for (int k = 0; k < 3; ++k) out << ',' << fmt17(r.lambdas[k].real());
        for (int k = 0; k < 3; ++k) out << ',' << fmt17(r.lambdas[k].imag());
        out << ',' << fmt17(r.coalescence) << ',' << (r.defective ? 1 : 0) << '\n';
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Open-qubit GKSL dynamics: simulation, spectra and exceptional-point sweeps", "lindbloch"};
    app.require_subcommand(1);

    std::string config_path, csv_path, svg_path, plane = "xy";
    double tol_flag = 0.0;
    auto* simulate_cmd = app.add_subcommand("simulate", "Integrate a run configuration and export the trajectory");
    simulate_cmd->add_option("--config", config_path, "JSON run configuration")->required();
    simulate_cmd->add_option("--csv", csv_path, "Trajectory CSV path (default: standard output)");
    auto* svg_opt = simulate_cmd->add_option("--svg", svg_path, "SVG projection path");
    simulate_cmd->add_option("--plane", plane, "Projection plane")->check(CLI::IsMember({"xy", "xz", "yz"}))->needs(svg_opt);
    auto* tol_opt = simulate_cmd->add_option("--tol", tol_flag, "Integrator tolerance");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Print the spectral report of the generator as JSON");
    spectrum_cmd->add_option("--config", config_path, "JSON run configuration")->required();

    double omega0 = 0.0, beta_min = 0.0, beta_max = 0.0;
    long long count = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep beta across the exceptional point");
    sweep_cmd->add_option("--omega0", omega0)->required();
    sweep_cmd->add_option("--beta-min", beta_min)->required();
    sweep_cmd->add_option("--beta-max", beta_max)->required();
    sweep_cmd->add_option("--count", count)->required();
    sweep_cmd->add_option("--csv", csv_path, "Output CSV path (default: standard output)");

    auto* validate_cmd = app.add_subcommand("validate", "Check a configuration against the schema");
    validate_cmd->add_option("--config", config_path, "JSON run configuration")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (*simulate_cmd) {
            const RunConfig cfg = load_config(config_path);
            const double tol = resolve_tolerance(cfg, tol_opt->count() ? std::optional<double>(tol_flag) : std::nullopt,
                                                 std::getenv("LINDBLOCH_TOL"));
            const SimulationTable table = simulate(cfg, tol);
            std::ostringstream csv;
            write_csv(table, csv);
            if (csv_path.empty()) {
                out << csv.str();
            } else {
                write_file(csv_path, csv.str());
                write_file(csv_path + ".meta.json", sidecar_json(cfg, table, tol));
            }
            if (!svg_path.empty()) render_svg(table.trajectory, parse_plane(plane), svg_path);
        } else if (*spectrum_cmd) {
            out << spectrum_report(load_config(config_path)) << '\n';
        } else if (*sweep_cmd) {
            if (!(omega0 > 0.0) || !std::isfinite(omega0)) fail("--omega0 must be > 0");
            if (!(beta_min >= 0.0)) fail("--beta-min must be >= 0");
            if (!(beta_max > beta_min) || !std::isfinite(beta_max)) fail("--beta-max must be > --beta-min");
            if (count < 2) fail("--count must be >= 2");
            const auto betas = linspace(beta_min, beta_max, static_cast<std::size_t>(count));
            std::ostringstream csv;
            write_sweep_csv(ep_sweep(omega0, betas), csv);
            if (csv_path.empty()) out << csv.str();
            else write_file(csv_path, csv.str());
        } else if (*validate_cmd) {
            load_config(config_path);
            out << "ok\n";
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIntegrator;
    }
    return kExitOk;
}

}  // namespace lindbloch::cli
