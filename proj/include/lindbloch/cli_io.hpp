#pragma once

// Command-line front end: run configuration, trajectory CSV export, SVG
// projections, JSON spectrum reports and the EP sweep table.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lindbloch/analysis.hpp"
#include "lindbloch/spherical_dynamics.hpp"

namespace lindbloch::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitIntegrator = 3,
    kExitIo = 4,
};

/// Schema violation; the message names the offending field.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

enum class Method { Exact, Spherical, Both };

struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t samples = 2;
};

struct RunConfig {
    QubitHamiltonian hamiltonian;
    DecayRates decay;
    std::optional<BlochVector> initial_bloch;
    std::optional<SphericalState> initial_spherical;
    std::optional<TimeGrid> time;
    Method method = Method::Exact;
    std::optional<double> tol;
    std::optional<long long> seed;
};

inline constexpr double kDefaultTol = 1e-9;

/// Parses and validates the JSON run configuration. Throws ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Tolerance precedence: explicit flag, then the config value, then the
/// LINDBLOCH_TOL environment variable, then kDefaultTol.
double resolve_tolerance(const RunConfig& cfg, std::optional<double> flag, const char* env_value);

struct SimulationTable {
    std::vector<double> times;
    std::vector<BlochVector> states;
    std::vector<double> theta;
    std::vector<double> phi;
    std::vector<long long> winding;
    std::vector<double> entropy;
    std::vector<double> discrepancy;  // only for Method::Both
    Trajectory trajectory;
    std::size_t chart_switches = 0;
    bool radius_collapsed = false;
};

/// Requires initial state and time grid; throws ConfigError otherwise.
SimulationTable simulate(const RunConfig& cfg, double tol);

void write_csv(const SimulationTable& table, std::ostream& out);

enum class Plane { XY, XZ, YZ };
Plane parse_plane(std::string_view s);

std::string svg_string(const Trajectory& traj, Plane plane);
/// Throws IoError when the file cannot be written.
void render_svg(const Trajectory& traj, Plane plane, const std::string& path);

/// JSON report with generator, eigenvalues, regime, coalescence, fixed
/// points and stability; numbers printed with 17 significant digits.
std::string spectrum_report(const RunConfig& cfg);

void write_sweep_csv(const std::vector<EpSweepRow>& rows, std::ostream& out);

/// %.17g formatting used by every emitter.
std::string fmt17(double x);

/// Runs the CLI on `args` (without the program name). Returns one of ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lindbloch::cli
