#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mvns/geometry.hpp"
#include "mvns/noise.hpp"
#include "mvns/operators.hpp"
#include "mvns/rereference.hpp"
#include "mvns/state.hpp"
#include "mvns/transform.hpp"

namespace mvns {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StepOptions {
    double solve_tol = 1e-12;
    double proj_tol = 1e-12;
    int restart = 40;
    int max_iter = 400;
};

/// One semi-implicit Euler-Maruyama step. bundle must be evaluated at (state.t, state.t0).
SolverState step(const SolverState& state, double dt, const OperatorBundle& bundle, const NoiseModel& noise,
                 const StepOptions& opt = {});

/// True iff ||v||_{1,t} > N.
bool detect_stopping(const SolverState& state, const MetricData& m);

/// Doubles N on the same path. Returns false (N unchanged) when the doubled level exceeds the ceiling.
bool escalate(SolverState& state, double ceiling);

enum class RereferenceMode { Off, Auto, Forced };

struct SimulationConfig {
    DomainMotion motion = DomainMotion::identity(1.0);
    Grid grid = Grid::make(16);
    double T = 0.1;
    double dt = 1e-3;
    NoiseModel noise;
    VectorField v0;
    double N0 = std::numeric_limits<double>::infinity();
    double N_ceiling = std::numeric_limits<double>::infinity();
    bool escalate = true;
    RereferenceMode rereference = RereferenceMode::Off;
    std::vector<double> forced_times;
    ReferencePolicy policy;
    int sample_every = 1;
    int snapshot_every = 0;
    StepOptions step;

    std::uint64_t total_steps() const;
};

/// Called after every completed step; return false to stop early (used for checkpointing).
using StepHook = std::function<bool(const SolverState&, const Trajectory&)>;

Trajectory simulate(const SimulationConfig& cfg, std::uint64_t seed, const StepHook& hook = nullptr);

/// Continues a trajectory from its stored state.
Trajectory resume(const SimulationConfig& cfg, Trajectory traj, const StepHook& hook = nullptr);

/// Physical velocity samples at the state's time.
StaggeredSamples physical_velocity(const SolverState& state, const DomainMotion& motion);

}  // namespace mvns
