#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvns/geometry.hpp"
#include "mvns/noise.hpp"
#include "mvns/rereference.hpp"
#include "mvns/sde.hpp"

namespace mvns {

/// Invalid configuration; names the offending field and, when known, its line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message, int line = 0);
    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

struct InitialSpec {
    std::string kind = "vortex";  ///< zero | vortex | modes | snapshot
    double amplitude = 1.0;
    std::vector<std::array<int, 2>> modes;
    std::string path;
};

struct RunConfig {
    std::string motion = "identity";  ///< identity | rotation | shear | wavy | table
    double motion_amplitude = 0.1;
    double motion_omega = 1.0;
    std::vector<ShearTerm> motion_table;

    int n = 16;
    double T = 0.1;
    double dt = 1e-3;
    double dt_max = 1e-2;

    int noise_K = 0;
    Coupling coupling = Coupling::Additive;
    double noise_amplitude = 0.0;

    InitialSpec initial;

    double N0 = std::numeric_limits<double>::infinity();
    double N_ceiling = std::numeric_limits<double>::infinity();
    bool escalate = true;
    std::vector<double> cutoff_sweep;

    RereferenceMode rereference = RereferenceMode::Off;
    std::vector<double> forced_times;
    ReferencePolicy policy;
    bool C0_from_audit = false;

    int ensemble = 1;
    std::uint64_t seed = 0;
    int workers = 1;

    std::string out_dir = "out";
    int sample_every = 1;
    int snapshot_every = 0;
    int checkpoint_every = 0;

    StepOptions step;

    int audit_samples = 50;
    std::vector<double> audit_times;
    int delta_points = 20;
    int delta_steps = 64;

    /// Verbatim source text, hashed into the manifest.
    std::string source;

    void validate() const;
};

/// Parses INI-style "key = value" text with [sections].
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

DomainMotion make_motion(const RunConfig& cfg);
VectorField make_initial(const RunConfig& cfg, const Grid& grid);
/// Simulation setup for one member at the configured (or overridden) cutoff level.
SimulationConfig make_simulation(const RunConfig& cfg, double N0);
SimulationConfig make_simulation(const RunConfig& cfg);

}  // namespace mvns
